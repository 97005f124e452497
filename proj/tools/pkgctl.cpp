// Command-line front end: run the REST service, bulk-ingest utterances, run
// SPARQL against the stored graphs and export Turtle.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "pkg/api.hpp"
#include "pkg/http_server.hpp"
#include "pkg/sparql.hpp"
#include "pkg/turtle.hpp"

namespace {

struct Settings {
    std::string listen = "127.0.0.1:8080";
    std::string data_file = "pkg-data.json";
    std::string annotator = "rule";
    std::string lexicon;
    std::string prompts_dir;
    std::string model_endpoint;
    std::string model_name;
    int model_timeout_ms = 30000;
    int model_max_in_flight = 4;
    std::string linker_endpoint;
    std::string linker_format = "native";
    int linker_timeout_ms = 5000;
    double link_threshold = 0.5;
    std::string admin_token;
    std::string base_iri = "http://localhost/pkg/";
};

std::unique_ptr<pkg::ApiService> make_service(const Settings& s) {
    pkg::ApiConfig config;
    config.base_iri = s.base_iri;
    config.admin_token = s.admin_token;
    config.link_threshold = s.link_threshold;
    config.data_file = s.data_file;

    pkg::ApiDeps deps;
    auto transport = std::make_shared<pkg::HttplibTransport>();
    if (s.annotator == "rule") {
        deps.annotator = s.lexicon.empty()
                             ? std::make_shared<pkg::RuleAnnotator>()
                             : std::make_shared<pkg::RuleAnnotator>(pkg::RelationLexicon::load(s.lexicon));
    } else if (s.annotator == "model") {
        if (s.model_endpoint.empty()) {
            throw std::runtime_error("annotator = model needs model_endpoint");
        }
        pkg::ModelEndpoint endpoint{s.model_endpoint, s.model_name, std::chrono::milliseconds(s.model_timeout_ms),
                                    static_cast<std::size_t>(s.model_max_in_flight)};
        auto prompts = s.prompts_dir.empty() ? pkg::PromptTemplates::builtin()
                                             : pkg::PromptTemplates::load(s.prompts_dir);
        deps.annotator = std::make_shared<pkg::ModelAnnotator>(
            std::make_shared<pkg::HttpChatBackend>(endpoint, transport), std::move(prompts),
            endpoint.max_in_flight);
    } else {
        throw std::runtime_error("annotator must be 'rule' or 'model', not '" + s.annotator + "'");
    }
    if (!s.linker_endpoint.empty()) {
        auto format = pkg::parse_linker_format(s.linker_format);
        if (!format) {
            throw std::runtime_error("linker_format must be native, rel or spotlight");
        }
        deps.linker = std::make_shared<pkg::HttpEntityLinker>(
            pkg::LinkerEndpoint{s.linker_endpoint, std::chrono::milliseconds(s.linker_timeout_ms), *format},
            transport);
    }
    auto service = std::make_unique<pkg::ApiService>(std::move(config), std::move(deps));
    if (std::filesystem::exists(s.data_file)) {
        service->load(s.data_file);
    }
    return service;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        throw std::runtime_error("listen must be host:port");
    }
    return {listen.substr(0, colon), std::stoi(listen.substr(colon + 1))};
}

std::atomic<pkg::HttpServer*> running_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* server = running_server.load()) {
        server->stop();
    }
}

int serve(const Settings& s) {
    auto service = make_service(s);
    pkg::HttpServer server(*service, [](const pkg::HttpRequest& req, const pkg::HttpResponse& res) {
        spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
    auto [host, port] = split_listen(s.listen);
    int bound = server.bind(host, port);
    running_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    spdlog::info("listening on {}:{} (annotator {}, data {})", host, bound, s.annotator, s.data_file);
    server.run();
    running_server = nullptr;
    spdlog::info("stopped");
    return 0;
}

pkg::Iri ensure_owner(pkg::ApiService& service, const std::string& owner) {
    auto iri = service.owner_iri(owner);
    if (!service.store().has_graph(iri)) {
        auto issued = service.register_owner(owner);
        std::cerr << "registered owner " << issued.id << "; token " << issued.token << '\n';
    }
    return iri;
}

int ingest(const Settings& s, const std::string& owner, const std::string& file) {
    auto service = make_service(s);
    auto agent = ensure_owner(*service, owner);
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot read " + file);
    }
    std::string line;
    int failures = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        pkg::HttpRequest request{"POST", "/pkg/" + owner + "/nl", {}, {}, nlohmann::json{{"statement", line}}.dump()};
        auto response = service->handle_as(agent, request);
        auto body = nlohmann::json::parse(response.body, nullptr, false);
        std::string intent = body.is_object() ? body.value("intent", "?") : "?";
        std::cout << line_no << '\t' << response.status << '\t' << intent << '\t' << line << '\n';
        if (response.status >= 400) {
            ++failures;
        }
    }
    return failures == 0 ? 0 : 2;
}

int query(const Settings& s, const std::string& owner, const std::string& text) {
    auto service = make_service(s);
    auto parsed = pkg::parse_sparql(text, service->owner_iri(owner));
    if (const auto* select = std::get_if<pkg::SelectQuery>(&parsed)) {
        auto table = service->store().execute_select(*select);
        for (std::size_t i = 0; i < table.variables.size(); ++i) {
            std::cout << (i ? "\t" : "") << '?' << table.variables[i];
        }
        std::cout << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::cout << (i ? "\t" : "") << pkg::to_ntriples(row[i]);
            }
            std::cout << '\n';
        }
        return 0;
    }
    auto before = service->store().revision();
    auto after = service->store().execute_update(std::get<pkg::UpdateQuery>(parsed));
    service->save(s.data_file);
    std::cout << (after == before ? "unchanged" : "updated") << '\n';
    return 0;
}

int export_owner(const Settings& s, const std::string& owner) {
    auto service = make_service(s);
    std::cout << pkg::export_turtle(service->store(), service->owner_iri(owner));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personal knowledge graph service and tools"};
    app.set_config("--config", "", "INI/TOML configuration file");
    app.require_subcommand(1);
    Settings s;
    app.add_option("--listen", s.listen, "host:port for serve");
    app.add_option("--data_file", s.data_file, "JSON snapshot of agents and graphs");
    app.add_option("--annotator", s.annotator, "rule or model");
    app.add_option("--lexicon", s.lexicon, "relation lexicon (lemma<TAB>polarity) replacing the built-in one");
    app.add_option("--prompts_dir", s.prompts_dir, "directory with intent.txt, spo.txt, preference.txt");
    app.add_option("--model_endpoint", s.model_endpoint, "chat endpoint URL");
    app.add_option("--model_name", s.model_name, "model name sent to the chat endpoint");
    app.add_option("--model_timeout", s.model_timeout_ms, "chat timeout in milliseconds");
    app.add_option("--model_max_in_flight", s.model_max_in_flight, "concurrent chat requests");
    app.add_option("--linker_endpoint", s.linker_endpoint, "external entity linker URL");
    app.add_option("--linker_format", s.linker_format, "native, rel or spotlight");
    app.add_option("--linker_timeout", s.linker_timeout_ms, "linker timeout in milliseconds");
    app.add_option("--link_threshold", s.link_threshold, "minimum external link confidence")->check(CLI::Range(0.0, 1.0));
    app.add_option("--admin_token", s.admin_token, "token for POST /admin/agents");
    app.add_option("--base_iri", s.base_iri, "prefix of owner IRIs");

    auto* serve_cmd = app.add_subcommand("serve", "run the REST service");

    std::string owner;
    std::string file;
    auto* ingest_cmd = app.add_subcommand("ingest", "add one natural-language statement per line");
    ingest_cmd->add_option("file", file, "utterance file")->required();
    ingest_cmd->add_option("--owner", owner, "owner name")->required();

    std::string sparql;
    auto* query_cmd = app.add_subcommand("query", "run a SPARQL query against an owner's graph");
    query_cmd->add_option("sparql", sparql, "query text")->required();
    query_cmd->add_option("--owner", owner, "owner name (default graph)")->required();

    auto* export_cmd = app.add_subcommand("export", "print an owner's graph as Turtle");
    export_cmd->add_option("owner", owner, "owner name")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*serve_cmd) {
            return serve(s);
        }
        if (*ingest_cmd) {
            return ingest(s, owner, file);
        }
        if (*query_cmd) {
            return query(s, owner, sparql);
        }
        if (*export_cmd) {
            return export_owner(s, owner);
        }
    } catch (const pkg::ParseError& e) {
        std::cerr << "parse error at " << e.line() << ':' << e.column() << ": " << e.detail() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
