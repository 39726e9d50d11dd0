def check_password(password, encoded, setter=None, preferred='default'):
    preferred = get_hasher(preferred)
    hasher = identify_hasher(encoded)
    hasher_changed = hasher.algorithm != preferred.algorithm
    must_update = hasher_changed or preferred.must_update(encoded)
    is_correct = hasher.verify(password, encoded)
    if not is_correct and not hasher_changed and not must_update:
        hasher.harden_runtime(password, encoded)
    if setter and is_correct and must_update:
        setter(password)
    return is_correct
