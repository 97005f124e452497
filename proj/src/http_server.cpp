#include "pkg/http_server.hpp"

#include <httplib.h>

namespace pkg {

struct HttpServer::Impl {
    Impl(ApiService& s, AccessLog l) : service(s), log(std::move(l)) {}

    ApiService& service;
    AccessLog log;
    httplib::Server server;

    void serve(const httplib::Request& req, httplib::Response& res) {
        HttpRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [k, v] : req.params) {
            request.query[k] = v;
        }
        for (const auto& [k, v] : req.headers) {
            request.headers[ascii_lower(k)] = v;
        }
        request.body = req.body;
        auto response = service.handle(request);
        res.status = response.status;
        for (const auto& [k, v] : response.headers) {
            res.set_header(k, v);
        }
        res.set_content(response.body, response.content_type);
        if (log) {
            log(request, response);
        }
    }
};

HttpServer::HttpServer(ApiService& service, AccessLog log) : impl_(std::make_unique<Impl>(service, std::move(log))) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->serve(req, res); };
    impl_->server.Get(".*", handler);
    impl_->server.Post(".*", handler);
    impl_->server.Put(".*", handler);
    impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw TransportError("cannot listen on " + host + ":" + std::to_string(port));
    }
    return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

} // namespace pkg
