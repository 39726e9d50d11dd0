class KwAsAttributes(Persistent):
    __roles__ = None
    def __init__(self, **kw):
        for key, val in list(kw.items()):
            setattr(self, key, val)
