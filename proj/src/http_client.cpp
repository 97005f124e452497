#include "pkg/http_client.hpp"

#include <httplib.h>

#include "pkg/error.hpp"

namespace pkg {

ParsedUrl parse_http_url(const std::string& url) {
    ParsedUrl out;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("not an absolute URL: " + url);
    }
    out.scheme = url.substr(0, scheme_end);
    if (out.scheme != "http") {
        throw TransportError("unsupported URL scheme '" + out.scheme + "' (only http)");
    }
    auto rest = url.substr(scheme_end + 3);
    auto slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        try {
            out.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw TransportError("bad port in URL: " + url);
        }
        authority.resize(colon);
    }
    if (authority.empty()) {
        throw TransportError("missing host in URL: " + url);
    }
    out.host = authority;
    return out;
}

std::string HttplibTransport::post_json(const std::string& url, const std::string& body,
                                        std::chrono::milliseconds timeout) {
    auto target = parse_http_url(url);
    httplib::Client client(target.host, target.port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
    client.set_write_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
    auto res = client.Post(target.path, body, "application/json");
    if (!res) {
        throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("POST " + url + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

} // namespace pkg
