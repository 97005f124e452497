#pragma once

#include <functional>
#include <memory>
#include <string>

#include "pkg/api.hpp"

namespace pkg {

/// Serves an ApiService over cpp-httplib.
class HttpServer {
public:
    using AccessLog = std::function<void(const HttpRequest&, const HttpResponse&)>;

    explicit HttpServer(ApiService& service, AccessLog log = {});
    ~HttpServer();

    /// Port 0 picks a free port. Returns the bound port; throws TransportError.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace pkg
