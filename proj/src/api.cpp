#include "pkg/api.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "pkg/json_codec.hpp"
#include "pkg/sparql.hpp"
#include "pkg/turtle.hpp"

namespace pkg {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) {
    HttpResponse r;
    r.status = status;
    r.body = body.dump();
    r.headers["X-Pkg-Schema-Version"] = std::to_string(kSchemaVersion);
    return r;
}

HttpResponse error_response(int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    return json_response(status, extra);
}

json parse_body(const HttpRequest& request) {
    auto body = json::parse(request.body, nullptr, false);
    if (body.is_discarded()) {
        throw ValidationError("$", "request body is not valid JSON");
    }
    return body;
}

bool valid_name(std::string_view name) {
    if (name.empty() || name.size() > 64 || name == "service") {
        return false;
    }
    auto ok = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    };
    return std::all_of(name.begin(), name.end(), ok);
}

std::string random_token() {
    std::random_device rd;
    std::string out;
    constexpr char hex[] = "0123456789abcdef";
    for (int i = 0; i < 32; ++i) {
        auto byte = rd() & 0xFFu;
        out += hex[byte >> 4];
        out += hex[byte & 0xF];
    }
    return out;
}

std::string_view kind_name(AgentKind kind) { return kind == AgentKind::Owner ? "owner" : "service"; }

bool can_read(const Agent& agent, const PkgStatement& st) {
    return agent.kind == AgentKind::Owner || st.access.read.count(agent.id) > 0;
}

bool can_write(const Agent& agent, const PkgStatement& st) {
    return agent.kind == AgentKind::Owner || st.access.write.count(agent.id) > 0;
}

std::vector<PkgStatement> readable(const Agent& agent, std::vector<PkgStatement> statements) {
    std::erase_if(statements, [&](const PkgStatement& st) { return !can_read(agent, st); });
    return statements;
}

json statements_json(const std::vector<PkgStatement>& statements) {
    json out = json::array();
    for (const auto& st : statements) {
        out.push_back(statement_to_json(st));
    }
    return out;
}

/// Query-string element: empty is a wildcard, `<...>` and http(s)/urn values
/// must be valid IRIs, anything else is label text.
std::optional<PatternElement> pattern_element(const std::string& value, const std::string& field) {
    if (value.empty()) {
        return std::nullopt;
    }
    bool iri_like = value.front() == '<' || value.starts_with("http://") || value.starts_with("https://") ||
                    value.starts_with("urn:");
    if (iri_like) {
        auto iri = literal_iri(value);
        if (!iri) {
            throw ValidationError(field, "not a valid IRI: '" + value + "'");
        }
        return *iri;
    }
    return value;
}

std::string label_of(const Iri& iri) {
    if (auto compact = ns::compact(iri)) {
        return *compact;
    }
    return iri.str();
}

json node_link_graph(const QuadStore& store, const Iri& graph) {
    auto quads = store.quads(graph);
    auto has_type = [&](const Term& s, const Iri& type) {
        return std::any_of(quads.begin(), quads.end(), [&](const Quad& q) {
            return q.subject == s && q.predicate == vocab::rdf_type && q.object == Term::iri(type);
        });
    };
    std::map<Iri, std::pair<std::string, std::string>> nodes; // id -> (kind, label)
    for (const auto& q : quads) {
        if (q.predicate != vocab::rdf_type || !q.object.is_node()) {
            continue;
        }
        const Iri& type = q.object.node_iri();
        if (type == vocab::rdf_Statement) {
            nodes[q.subject.node_iri()].first = "statement";
        } else if (type == vocab::skos_Concept) {
            nodes[q.subject.node_iri()].first = "concept";
        } else if (type == vocab::pkg_Preference) {
            nodes[q.subject.node_iri()].first = "preference";
        }
    }
    for (const auto& q : quads) {
        auto it = nodes.find(q.subject.is_node() ? q.subject.node_iri() : Iri{});
        if (it == nodes.end() || !q.object.is_literal()) {
            continue;
        }
        if ((it->second.first == "statement" && q.predicate == vocab::dcterms_description) ||
            (it->second.first == "concept" && q.predicate == vocab::skos_prefLabel) ||
            (it->second.first == "preference" && q.predicate == vocab::pkg_weight)) {
            it->second.second = q.object.str();
        }
    }
    static const std::set<Iri> statement_edges = {vocab::rdf_subject, vocab::rdf_predicate, vocab::rdf_object,
                                                  vocab::pav_createdBy, vocab::pav_derivedFrom};
    static const std::set<Iri> preference_edges = {vocab::pkg_topic, vocab::pav_derivedFrom};
    static const std::set<Iri> concept_edges = {vocab::skos_related, vocab::skos_broader, vocab::skos_narrower};
    json edges = json::array();
    std::set<std::tuple<Iri, Iri, Iri>> seen;
    auto edge = [&](const Iri& from, const Iri& property, const Iri& to) {
        if (!seen.emplace(from, property, to).second) {
            return;
        }
        if (!nodes.count(to)) {
            nodes[to] = {to == graph ? "owner" : "entity", label_of(to)};
        }
        if (!nodes.count(from)) {
            nodes[from] = {from == graph ? "owner" : "entity", label_of(from)};
        }
        edges.push_back({{"source", from.str()}, {"target", to.str()}, {"label", label_of(property)}});
    };
    for (const auto& q : quads) {
        if (!q.subject.is_node() || !q.object.is_node()) {
            continue;
        }
        const Iri& s = q.subject.node_iri();
        const Iri& o = q.object.node_iri();
        auto kind = nodes.count(s) ? nodes[s].first : std::string{};
        if ((kind == "statement" && statement_edges.count(q.predicate)) ||
            (kind == "preference" && preference_edges.count(q.predicate)) ||
            (kind == "concept" && concept_edges.count(q.predicate))) {
            edge(s, q.predicate, o);
        } else if (q.predicate == vocab::pkg_preference && has_type(q.object, vocab::pkg_Preference)) {
            edge(s, q.predicate, o);
        }
    }
    json node_list = json::array();
    for (const auto& [id, info] : nodes) {
        node_list.push_back({{"id", id.str()}, {"kind", info.first}, {"label", info.second}});
    }
    return {{"nodes", node_list}, {"edges", edges}};
}

} // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

ApiService::ApiService(ApiConfig config, ApiDeps deps) : config_(std::move(config)), deps_(std::move(deps)) {
    if (!deps_.annotator) {
        deps_.annotator = std::make_shared<RuleAnnotator>();
    }
    if (!deps_.ids) {
        deps_.ids = std::make_shared<RandomIdMinter>();
    }
    if (!deps_.clock) {
        deps_.clock = std::make_shared<SystemClock>();
    }
    if (!Iri{config_.base_iri + "x"}.valid()) {
        throw ValidationError("base_iri", "not a valid IRI prefix: '" + config_.base_iri + "'");
    }
}

ApiService::~ApiService() = default;

Iri ApiService::owner_iri(const std::string& name) const { return Iri{config_.base_iri + name}; }

Iri ApiService::service_iri(const std::string& name) const { return Iri{config_.base_iri + "service/" + name}; }

ApiService::Issued ApiService::register_owner(const std::string& name) {
    if (!valid_name(name)) {
        throw ValidationError("name", "owner names use letters, digits, '_' and '-'");
    }
    Agent agent{owner_iri(name), AgentKind::Owner, {}, {owner_iri(name)}};
    auto token = random_token();
    agent.token_hash = sha256_hex(token);
    {
        std::unique_lock lock(agents_mutex_);
        if (hash_by_agent_.count(agent.id)) {
            throw ValidationError("name", "owner already registered: " + name);
        }
        store_.register_graph(agent.id);
        hash_by_agent_[agent.id] = agent.token_hash;
        agents_by_hash_[agent.token_hash] = agent;
    }
    persist();
    return {agent.id, token};
}

ApiService::Issued ApiService::register_service(const std::string& name, const std::vector<std::string>& owners) {
    if (!valid_name(name)) {
        throw ValidationError("name", "service names use letters, digits, '_' and '-'");
    }
    Agent agent{service_iri(name), AgentKind::Service, {}, {}};
    auto token = random_token();
    agent.token_hash = sha256_hex(token);
    {
        std::unique_lock lock(agents_mutex_);
        if (hash_by_agent_.count(agent.id)) {
            throw ValidationError("name", "service already registered: " + name);
        }
        for (const auto& owner : owners) {
            auto graph = owner_iri(owner);
            auto it = hash_by_agent_.find(graph);
            if (!valid_name(owner) || it == hash_by_agent_.end() ||
                agents_by_hash_.at(it->second).kind != AgentKind::Owner) {
                throw ValidationError("owners", "unknown owner: " + owner);
            }
            agent.graphs.insert(graph);
        }
        hash_by_agent_[agent.id] = agent.token_hash;
        agents_by_hash_[agent.token_hash] = agent;
    }
    persist();
    return {agent.id, token};
}

std::optional<Agent> ApiService::authenticate(const HttpRequest& request) const {
    auto it = request.headers.find("authorization");
    if (it == request.headers.end()) {
        return std::nullopt;
    }
    constexpr std::string_view kBearer = "Bearer ";
    std::string_view value = it->second;
    if (!value.starts_with(kBearer)) {
        return std::nullopt;
    }
    auto hash = sha256_hex(value.substr(kBearer.size()));
    std::shared_lock lock(agents_mutex_);
    auto agent = agents_by_hash_.find(hash);
    if (agent == agents_by_hash_.end()) {
        return std::nullopt;
    }
    return agent->second;
}

std::mutex& ApiService::owner_mutex(const Iri& graph) {
    std::lock_guard lock(owner_mutexes_guard_);
    auto& slot = owner_mutexes_[graph];
    if (!slot) {
        slot = std::make_unique<std::mutex>();
    }
    return *slot;
}

void ApiService::persist() {
    if (config_.data_file) {
        save(*config_.data_file);
    }
}

HttpResponse ApiService::handle(const HttpRequest& request) { return handle_as(Iri{}, request); }

HttpResponse ApiService::handle_as(const Iri& agent_id, const HttpRequest& request) {
    std::optional<Agent> agent;
    if (!agent_id.empty()) {
        std::shared_lock lock(agents_mutex_);
        auto it = hash_by_agent_.find(agent_id);
        if (it == hash_by_agent_.end()) {
            return error_response(401, "unknown agent " + agent_id.str());
        }
        agent = agents_by_hash_.at(it->second);
    }
    try {
        return dispatch(request, agent);
    } catch (const ValidationError& e) {
        return error_response(400, e.what(), {{"violations", violations_to_json(e.violations())}});
    } catch (const ParseError& e) {
        return error_response(400, e.what());
    } catch (const UnsupportedAction& e) {
        return error_response(422, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

HttpResponse ApiService::dispatch(const HttpRequest& request, const std::optional<Agent>& preauthenticated) {
    if (request.path == "/admin/agents") {
        if (request.method != "POST") {
            return error_response(405, "method not allowed");
        }
        return admin_agents(request);
    }
    constexpr std::string_view kPrefix = "/pkg/";
    std::string_view path = request.path;
    if (!path.starts_with(kPrefix)) {
        return error_response(404, "no such endpoint");
    }
    path.remove_prefix(kPrefix.size());
    std::vector<std::string> segments;
    auto slash = path.find('/');
    segments.emplace_back(path.substr(0, slash));
    if (slash != std::string_view::npos) {
        auto rest = path.substr(slash + 1);
        auto next = rest.find('/');
        segments.emplace_back(rest.substr(0, next));
        if (next != std::string_view::npos) {
            // Everything after the resource name, which may itself hold slashes
            // when a full statement IRI is given.
            segments.emplace_back(rest.substr(next + 1));
        }
    }
    if (segments.size() < 2) {
        return error_response(404, "no such endpoint");
    }
    return owner_route(request, segments, preauthenticated);
}

HttpResponse ApiService::admin_agents(const HttpRequest& request) {
    auto it = request.headers.find("authorization");
    if (config_.admin_token.empty() || it == request.headers.end() ||
        sha256_hex(it->second) != sha256_hex("Bearer " + config_.admin_token)) {
        return error_response(401, "admin token required");
    }
    auto body = parse_body(request);
    if (!body.is_object() || !body.contains("kind") || !body["kind"].is_string() || !body.contains("name") ||
        !body["name"].is_string()) {
        throw ValidationError("$", "expected {kind, name[, owners]}");
    }
    auto kind = body["kind"].get<std::string>();
    auto name = body["name"].get<std::string>();
    Issued issued;
    if (kind == "owner") {
        issued = register_owner(name);
    } else if (kind == "service") {
        std::vector<std::string> owners;
        if (body.contains("owners")) {
            if (!body["owners"].is_array()) {
                throw ValidationError("owners", "expected an array of owner names");
            }
            for (const auto& o : body["owners"]) {
                if (!o.is_string()) {
                    throw ValidationError("owners", "expected an array of owner names");
                }
                owners.push_back(o.get<std::string>());
            }
        }
        issued = register_service(name, owners);
    } else {
        throw ValidationError("kind", "must be 'owner' or 'service'");
    }
    return json_response(201, {{"id", issued.id.str()}, {"kind", kind}, {"token", issued.token}});
}

HttpResponse ApiService::owner_route(const HttpRequest& request, const std::vector<std::string>& segments,
                                     std::optional<Agent> agent) {
    if (!agent) {
        agent = authenticate(request);
    }
    if (!agent) {
        return error_response(401, "missing or unknown bearer token");
    }
    const Iri graph = owner_iri(segments[0]);
    if (!valid_name(segments[0]) || !store_.has_graph(graph)) {
        return error_response(404, "no such PKG: " + segments[0]);
    }
    if (!agent->graphs.count(graph)) {
        return error_response(403, "agent is not registered on this PKG");
    }
    const std::string& resource = segments[1];
    const std::string& method = request.method;
    std::optional<std::string> tail;
    if (segments.size() > 2) {
        tail = segments[2];
    }

    if (resource == "nl" && !tail) {
        return method == "POST" ? post_nl(*agent, graph, request) : error_response(405, "method not allowed");
    }
    if (resource == "statements") {
        if (!tail) {
            if (method == "POST") {
                return post_statement(*agent, graph, request);
            }
            if (method == "GET") {
                return get_statements(*agent, graph, request);
            }
            return error_response(405, "method not allowed");
        }
        std::string id_text = *tail;
        bool access = false;
        constexpr std::string_view kAccess = "/access";
        if (id_text.ends_with(kAccess)) {
            access = true;
            id_text.resize(id_text.size() - kAccess.size());
        }
        if (id_text.empty()) {
            return error_response(404, "no such endpoint");
        }
        Iri id = id_text.find(':') != std::string::npos ? Iri{id_text} : Iri{graph.str() + "/stmt/" + id_text};
        if (access) {
            return method == "PUT" ? put_access(*agent, graph, id, request) : error_response(405, "method not allowed");
        }
        if (method == "GET") {
            return get_statement(*agent, graph, id);
        }
        if (method == "DELETE") {
            return delete_statement(*agent, graph, id);
        }
        return error_response(405, "method not allowed");
    }
    if (resource == "preferences" && !tail) {
        return method == "GET" ? get_preferences(*agent, graph, request) : error_response(405, "method not allowed");
    }
    if (resource == "graph" && !tail) {
        return method == "GET" ? get_graph(*agent, graph) : error_response(405, "method not allowed");
    }
    if (resource == "export" && !tail) {
        return method == "GET" ? get_export(*agent, graph) : error_response(405, "method not allowed");
    }
    if (resource == "aliases") {
        return aliases(*agent, graph, request, tail);
    }
    return error_response(404, "no such endpoint");
}

ActionResult ApiService::add_statement(const Agent& agent, const Iri& graph, PkgStatement stmt) {
    canonicalize_concepts(store_, graph, stmt);
    if (agent.kind == AgentKind::Service) {
        stmt.access.read.insert(agent.id);
        stmt.access.write.insert(agent.id);
    }
    return execute_action(store_, PkgAction::add(std::move(stmt)), graph);
}

HttpResponse ApiService::post_nl(const Agent& agent, const Iri& graph, const HttpRequest& request) {
    auto body = parse_body(request);
    if (!body.is_object() || !body.contains("statement") || !body["statement"].is_string()) {
        throw ValidationError("statement", "expected a string");
    }
    auto utterance = body["statement"].get<std::string>();
    auto annotation = deps_.annotator->annotate(utterance, AnnotationContext{graph});
    if (annotation.intent == Intent::Unknown) {
        return json_response(422, {{"intent", "UNKNOWN"},
                                   {"annotation", annotation_to_json(annotation)},
                                   {"error", "the statement was not understood"}});
    }
    if (auto violations = validate_annotation(annotation); !violations.empty()) {
        return json_response(422, {{"intent", std::string(to_string(annotation.intent))},
                                   {"annotation", annotation_to_json(annotation)},
                                   {"violations", violations_to_json(violations)},
                                   {"error", "annotation failed validation"}});
    }

    std::lock_guard lock(owner_mutex(graph));
    auto aliases = PersonalAliasTable::from_store(store_, graph);
    std::vector<std::string> warnings = annotation.warnings;
    json response;
    if (annotation.intent == Intent::Add) {
        LinkingContext ctx{aliases, deps_.linker.get(), config_.link_threshold};
        auto resolution = resolve(annotation, ctx, *deps_.ids, agent.id, deps_.clock->now());
        warnings.insert(warnings.end(), resolution.warnings.begin(), resolution.warnings.end());
        auto result = add_statement(agent, graph, std::move(resolution.statement));
        response = action_result_to_json(result);
        if (auto stored = fetch_statement(store_, graph, std::get<Iri>(result.result))) {
            response["result"]["statement"] = statement_to_json(*stored);
        }
        persist();
    } else {
        auto pattern = resolve_pattern(annotation, aliases);
        if (annotation.intent == Intent::Delete && agent.kind == AgentKind::Service) {
            auto located = fetch_statements(store_, graph, locate(store_, pattern, graph));
            for (const auto& st : located) {
                if (!can_write(agent, st)) {
                    return error_response(403, "no write access to " + st.id.str(),
                                          {{"annotation", annotation_to_json(annotation)}});
                }
            }
        }
        auto action = annotation.intent == Intent::Get ? PkgAction::get(pattern) : PkgAction::remove(pattern);
        auto result = execute_action(store_, action, graph);
        if (auto* statements = std::get_if<std::vector<PkgStatement>>(&result.result)) {
            *statements = readable(agent, std::move(*statements));
        }
        response = action_result_to_json(result);
        if (annotation.intent == Intent::Delete) {
            persist();
        }
    }
    response["annotation"] = annotation_to_json(annotation);
    response["warnings"] = warnings;
    return json_response(200, response);
}

HttpResponse ApiService::post_statement(const Agent& agent, const Iri& graph, const HttpRequest& request) {
    auto body = parse_body(request);
    if (!body.is_object()) {
        throw ValidationError("$", "expected an object");
    }
    auto element = [&](const char* key) -> SpoElement {
        if (!body.contains(key)) {
            throw ValidationError(key, "required");
        }
        auto& j = body[key];
        // Concept ids are optional on input and minted when absent.
        if (j.is_object() && j.contains("concept") && j["concept"].is_object() && !j["concept"].contains("id")) {
            json copy = j;
            copy["concept"]["id"] = deps_.ids->mint(graph, NodeKind::Concept).str();
            return element_from_json(copy, key);
        }
        return element_from_json(j, key);
    };
    PkgStatement st;
    st.id = deps_.ids->mint(graph, NodeKind::Statement);
    if (!body.contains("annotation") || !body["annotation"].is_string()) {
        throw ValidationError("annotation", "expected a string");
    }
    st.annotation = body["annotation"].get<std::string>();
    st.subject = element("subject");
    st.predicate = element("predicate");
    st.object = element("object");
    st.provenance.created_by = agent.id;
    st.provenance.created_on = deps_.clock->now();
    if (body.contains("derivedFrom")) {
        if (!body["derivedFrom"].is_string()) {
            throw ValidationError("derivedFrom", "expected an IRI string");
        }
        st.provenance.derived_from = Iri{body["derivedFrom"].get<std::string>()};
    }
    if (body.contains("access")) {
        st.access = access_from_json(body["access"]);
    }
    if (body.contains("preference") && !body["preference"].is_null()) {
        const auto& pj = body["preference"];
        if (!pj.is_object() || !pj.contains("weight") || !pj["weight"].is_number()) {
            throw ValidationError("preference.weight", "expected a number");
        }
        Preference pref;
        pref.id = deps_.ids->mint(graph, NodeKind::Preference);
        pref.holder = element_iri(st.subject);
        pref.topic = st.object;
        pref.weight = pj["weight"].get<double>();
        pref.derived_from = st.id;
        st.preference = std::move(pref);
    }
    if (auto violations = validate_statement(st, ValidationContext{graph, deps_.clock->now()}); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    std::lock_guard lock(owner_mutex(graph));
    auto result = add_statement(agent, graph, std::move(st));
    auto response = action_result_to_json(result);
    if (auto stored = fetch_statement(store_, graph, std::get<Iri>(result.result))) {
        response["result"]["statement"] = statement_to_json(*stored);
    }
    persist();
    return json_response(201, response);
}

HttpResponse ApiService::get_statements(const Agent& agent, const Iri& graph, const HttpRequest& request) {
    StatementPattern pattern;
    for (const auto& [key, value] : request.query) {
        if (key == "s") {
            pattern.subject = pattern_element(value, "s");
        } else if (key == "p") {
            pattern.predicate = pattern_element(value, "p");
        } else if (key == "o") {
            pattern.object = pattern_element(value, "o");
        } else {
            throw ValidationError(key, "unknown query parameter");
        }
    }
    auto statements = fetch_statements(store_, graph, locate(store_, pattern, graph));
    return json_response(200, statements_json(readable(agent, std::move(statements))));
}

HttpResponse ApiService::get_statement(const Agent& agent, const Iri& graph, const Iri& id) {
    auto st = fetch_statement(store_, graph, id);
    if (!st) {
        return error_response(404, "no such statement: " + id.str());
    }
    if (!can_read(agent, *st)) {
        return error_response(403, "no read access to " + id.str());
    }
    return json_response(200, statement_to_json(*st));
}

HttpResponse ApiService::delete_statement(const Agent& agent, const Iri& graph, const Iri& id) {
    std::lock_guard lock(owner_mutex(graph));
    auto st = fetch_statement(store_, graph, id);
    if (!st) {
        return error_response(404, "no such statement: " + id.str());
    }
    if (!can_write(agent, *st)) {
        return error_response(403, "no write access to " + id.str());
    }
    auto outcome = delete_statements(store_, graph, {id});
    ActionResult r;
    r.intent = Intent::Delete;
    for (const auto& q : outcome.queries) {
        r.query += (r.query.empty() ? "" : "\n\n") + to_sparql(q);
    }
    r.result = outcome.removed;
    persist();
    return json_response(200, action_result_to_json(r));
}

HttpResponse ApiService::put_access(const Agent& agent, const Iri& graph, const Iri& id, const HttpRequest& request) {
    if (agent.kind != AgentKind::Owner) {
        return error_response(403, "only the owner may change access rights");
    }
    auto policy = access_from_json(parse_body(request), "");
    std::lock_guard lock(owner_mutex(graph));
    if (!fetch_statement(store_, graph, id)) {
        return error_response(404, "no such statement: " + id.str());
    }
    replace_access(store_, graph, id, policy);
    persist();
    return json_response(200, statement_to_json(*fetch_statement(store_, graph, id)));
}

HttpResponse ApiService::get_preferences(const Agent& agent, const Iri& graph, const HttpRequest& request) {
    std::optional<std::string> topic;
    for (const auto& [key, value] : request.query) {
        if (key != "topic") {
            throw ValidationError(key, "unknown query parameter");
        }
        if (!value.empty()) {
            topic = value;
        }
    }
    std::optional<Iri> topic_iri;
    if (topic) {
        if (auto element = pattern_element(*topic, "topic"); element && std::holds_alternative<Iri>(*element)) {
            topic_iri = std::get<Iri>(*element);
        }
    }
    json out = json::array();
    auto statements = readable(agent, fetch_statements(store_, graph, locate(store_, {}, graph)));
    for (const auto& st : statements) {
        if (!st.preference) {
            continue;
        }
        const auto& t = st.preference->topic;
        bool match = !topic;
        if (topic_iri) {
            match = element_iri(t) == *topic_iri;
        } else if (topic) {
            const auto* c = std::get_if<Concept>(&t);
            match = (c && ascii_lower(c->text) == ascii_lower(*topic)) || element_iri(t).str() == *topic;
        }
        if (match) {
            out.push_back(preference_to_json(*st.preference));
        }
    }
    return json_response(200, out);
}

HttpResponse ApiService::get_graph(const Agent& agent, const Iri& graph) {
    if (agent.kind != AgentKind::Owner) {
        return error_response(403, "only the owner may view the whole graph");
    }
    return json_response(200, node_link_graph(store_, graph));
}

HttpResponse ApiService::get_export(const Agent& agent, const Iri& graph) {
    if (agent.kind != AgentKind::Owner) {
        return error_response(403, "only the owner may export the graph");
    }
    HttpResponse r;
    r.content_type = "text/turtle";
    r.body = export_turtle(store_, graph);
    return r;
}

HttpResponse ApiService::aliases(const Agent& agent, const Iri& graph, const HttpRequest& request,
                                 const std::optional<std::string>& alias) {
    if (agent.kind != AgentKind::Owner) {
        return error_response(403, "only the owner manages aliases");
    }
    std::lock_guard lock(owner_mutex(graph));
    auto table = PersonalAliasTable::from_store(store_, graph);
    auto listing = [&](int status) {
        json entries = json::object();
        for (const auto& [key, iri] : table.entries()) {
            entries[key] = iri.str();
        }
        return json_response(status, {{"aliases", entries}});
    };
    auto old = table.to_quads();
    if (request.method == "GET" && !alias) {
        return listing(200);
    }
    if (request.method == "POST" && !alias) {
        auto body = parse_body(request);
        if (!body.is_object() || !body.contains("alias") || !body["alias"].is_string() || !body.contains("iri") ||
            !body["iri"].is_string()) {
            throw ValidationError("$", "expected {alias, iri}");
        }
        table.add(body["alias"].get<std::string>(), Iri{body["iri"].get<std::string>()});
    } else if (request.method == "DELETE" && alias) {
        if (!table.remove(*alias)) {
            return error_response(404, "no such alias: " + *alias);
        }
    } else {
        return error_response(405, "method not allowed");
    }
    store_.erase(old);
    store_.insert(table.to_quads());
    persist();
    return listing(200);
}

void ApiService::save(const std::filesystem::path& file) const {
    json doc = {{"version", kSchemaVersion}, {"baseIri", config_.base_iri}};
    json agents = json::array();
    {
        std::shared_lock lock(agents_mutex_);
        for (const auto& [hash, agent] : agents_by_hash_) {
            json graphs = json::array();
            for (const auto& g : agent.graphs) {
                graphs.push_back(g.str());
            }
            agents.push_back({{"id", agent.id.str()},
                              {"kind", std::string(kind_name(agent.kind))},
                              {"tokenSha256", hash},
                              {"graphs", graphs}});
        }
    }
    doc["agents"] = agents;
    json graphs = json::object();
    for (const auto& g : store_.graphs()) {
        graphs[g.str()] = export_turtle(store_, g);
    }
    doc["graphs"] = graphs;

    std::lock_guard lock(const_cast<std::mutex&>(persist_mutex_));
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << doc.dump(2) << '\n';
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, file);
}

void ApiService::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + file.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto doc = json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.value("version", 0) != kSchemaVersion ||
        !doc.contains("agents") || !doc["agents"].is_array() || !doc.contains("graphs") ||
        !doc["graphs"].is_object()) {
        throw Error("malformed data file " + file.string());
    }
    std::map<std::string, Agent> by_hash;
    std::map<Iri, std::string> by_agent;
    try {
        for (const auto& a : doc["agents"]) {
            Agent agent;
            agent.id = Iri{a.at("id").get<std::string>()};
            agent.kind = a.at("kind").get<std::string>() == "owner" ? AgentKind::Owner : AgentKind::Service;
            agent.token_hash = a.at("tokenSha256").get<std::string>();
            for (const auto& g : a.at("graphs")) {
                agent.graphs.insert(Iri{g.get<std::string>()});
            }
            by_agent[agent.id] = agent.token_hash;
            by_hash[agent.token_hash] = std::move(agent);
        }
    } catch (const json::exception& e) {
        throw Error("malformed agent entry in " + file.string() + ": " + e.what());
    }
    for (const auto& [name, turtle] : doc["graphs"].items()) {
        if (!turtle.is_string()) {
            throw Error("malformed graph entry in " + file.string());
        }
        Iri graph{name};
        store_.register_graph(graph);
        import_turtle(store_, graph, turtle.get<std::string>());
    }
    std::unique_lock lock(agents_mutex_);
    agents_by_hash_ = std::move(by_hash);
    hash_by_agent_ = std::move(by_agent);
}

} // namespace pkg
