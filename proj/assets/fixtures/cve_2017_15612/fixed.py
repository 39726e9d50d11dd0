def escape_link(url):
    lower_url = url.lower().strip('\x00\x1a \n\r\t')
    lower_url = re.sub('[^a-zA-Z0-9.:]+', '', lower_url)
    for scheme in _scheme_blacklist:
        if lower_url.startswith(scheme):
            return ''
    return escape(url, quote=True, smart_amp=False)
