def resolve_redirects(self, resp, req, url, stream=False, timeout=None, verify=True, cert=None, proxies=None):
    prepared_request = req.copy()
    headers = prepared_request.headers
    original_parsed = urlparse(resp.request.url)
    redirect_parsed = urlparse(url)
    resp = self.send(prepared_request, stream=stream, timeout=timeout, verify=verify, cert=cert, proxies=proxies, allow_redirects=False)
    return resp
