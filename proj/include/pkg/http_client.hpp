#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace pkg {

/// Minimal JSON-over-HTTP POST used by the model annotator and the external
/// linker. Implementations throw TransportError on connection failures,
/// timeouts and non-2xx statuses.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual std::string post_json(const std::string& url, const std::string& body,
                                  std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport for `http://host[:port]/path` URLs.
class HttplibTransport final : public HttpTransport {
public:
    std::string post_json(const std::string& url, const std::string& body,
                          std::chrono::milliseconds timeout) override;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 80;
    std::string path;
};

/// Throws TransportError for anything but an absolute http URL.
ParsedUrl parse_http_url(const std::string& url);

} // namespace pkg
