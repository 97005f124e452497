#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "pkg/clock.hpp"
#include "pkg/connector.hpp"
#include "pkg/ids.hpp"
#include "pkg/linking.hpp"
#include "pkg/nl2pkg.hpp"
#include "pkg/store.hpp"

namespace pkg {

struct HttpRequest {
    std::string method;
    /// Already percent-decoded.
    std::string path;
    std::map<std::string, std::string> query;
    /// Keys lower-cased.
    std::map<std::string, std::string> headers;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

enum class AgentKind { Owner, Service };

struct Agent {
    Iri id;
    AgentKind kind = AgentKind::Service;
    /// Hex SHA-256 of the bearer token.
    std::string token_hash;
    /// Owner graphs the agent may act on; an owner has exactly its own.
    std::set<Iri> graphs;
};

std::string sha256_hex(std::string_view data);

struct ApiConfig {
    /// Owner IRIs (and graph names) are base_iri + owner name.
    std::string base_iri = "http://localhost/pkg/";
    /// Required by POST /admin/agents; empty disables the endpoint.
    std::string admin_token;
    double link_threshold = 0.5;
    /// Snapshot written after every successful mutation when set.
    std::optional<std::filesystem::path> data_file;
};

struct ApiDeps {
    std::shared_ptr<Annotator> annotator;
    /// Optional.
    std::shared_ptr<EntityLinker> linker;
    std::shared_ptr<IdMinter> ids;
    std::shared_ptr<Clock> clock;
};

/// Transport-independent REST service. Routes:
///   POST   /admin/agents
///   POST   /pkg/{owner}/nl
///   POST   /pkg/{owner}/statements
///   GET    /pkg/{owner}/statements?s=&p=&o=
///   GET    /pkg/{owner}/statements/{id}
///   DELETE /pkg/{owner}/statements/{id}
///   PUT    /pkg/{owner}/statements/{id}/access
///   GET    /pkg/{owner}/preferences?topic=
///   GET    /pkg/{owner}/graph
///   GET    /pkg/{owner}/export
///   GET    /pkg/{owner}/aliases, POST /pkg/{owner}/aliases, DELETE /pkg/{owner}/aliases/{alias}
class ApiService {
public:
    ApiService(ApiConfig config, ApiDeps deps);
    ~ApiService();

    HttpResponse handle(const HttpRequest& request);
    /// Same routes, acting as an already-authenticated agent. For in-process
    /// callers such as the command-line tool.
    HttpResponse handle_as(const Iri& agent, const HttpRequest& request);

    struct Issued {
        Iri id;
        std::string token;
    };
    /// Creates the owner agent and its graph. Throws ValidationError for a bad
    /// or taken name.
    Issued register_owner(const std::string& name);
    /// Throws ValidationError for a bad or taken name or an unknown owner.
    Issued register_service(const std::string& name, const std::vector<std::string>& owners);

    Iri owner_iri(const std::string& name) const;
    Iri service_iri(const std::string& name) const;

    QuadStore& store() noexcept { return store_; }
    const QuadStore& store() const noexcept { return store_; }

    /// Agents (hashed tokens only) plus every graph as Turtle.
    void save(const std::filesystem::path& file) const;
    /// Merges a snapshot into the current state; meant for start-up. Throws
    /// Error on unreadable or malformed files.
    void load(const std::filesystem::path& file);

private:
    struct Route;

    HttpResponse dispatch(const HttpRequest& request, const std::optional<Agent>& preauthenticated);
    HttpResponse admin_agents(const HttpRequest& request);
    HttpResponse owner_route(const HttpRequest& request, const std::vector<std::string>& segments,
                             std::optional<Agent> agent);

    HttpResponse post_nl(const Agent& agent, const Iri& graph, const HttpRequest& request);
    HttpResponse post_statement(const Agent& agent, const Iri& graph, const HttpRequest& request);
    HttpResponse get_statements(const Agent& agent, const Iri& graph, const HttpRequest& request);
    HttpResponse get_statement(const Agent& agent, const Iri& graph, const Iri& id);
    HttpResponse delete_statement(const Agent& agent, const Iri& graph, const Iri& id);
    HttpResponse put_access(const Agent& agent, const Iri& graph, const Iri& id, const HttpRequest& request);
    HttpResponse get_preferences(const Agent& agent, const Iri& graph, const HttpRequest& request);
    HttpResponse get_graph(const Agent& agent, const Iri& graph);
    HttpResponse get_export(const Agent& agent, const Iri& graph);
    HttpResponse aliases(const Agent& agent, const Iri& graph, const HttpRequest& request,
                         const std::optional<std::string>& alias);

    std::optional<Agent> authenticate(const HttpRequest& request) const;
    std::mutex& owner_mutex(const Iri& graph);
    ActionResult add_statement(const Agent& agent, const Iri& graph, PkgStatement stmt);
    void persist();

    ApiConfig config_;
    ApiDeps deps_;
    QuadStore store_;

    mutable std::shared_mutex agents_mutex_;
    std::map<std::string, Agent> agents_by_hash_;
    std::map<Iri, std::string> hash_by_agent_;

    std::mutex owner_mutexes_guard_;
    std::map<Iri, std::unique_ptr<std::mutex>> owner_mutexes_;
    std::mutex persist_mutex_;
};

} // namespace pkg
