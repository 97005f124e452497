#include "pkg/connector.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pkg {

namespace {

Term node(const Iri& iri) { return Term::iri(iri); }

TriplePattern triple(PatternTerm s, const Iri& p, PatternTerm o) { return {std::move(s), node(p), std::move(o)}; }

bool is_statement(const QuadStore& store, const Iri& graph, const Iri& id) {
    return !store.match(graph, triple(node(id), vocab::rdf_type, node(vocab::rdf_Statement))).empty();
}

bool is_concept(const QuadStore& store, const Iri& graph, const Iri& id) {
    return !store.match(graph, triple(node(id), vocab::rdf_type, node(vocab::skos_Concept))).empty();
}

const std::set<Iri>& concept_predicates() {
    static const std::set<Iri> preds = {vocab::rdf_type,       vocab::skos_prefLabel, vocab::skos_inScheme,
                                        vocab::skos_related,   vocab::skos_broader,   vocab::skos_narrower};
    return preds;
}

void append_outgoing(const QuadStore& store, const Iri& graph, const Iri& subject, std::vector<Quad>& out,
                     const std::set<Iri>* only = nullptr) {
    for (const auto& row : store.match(graph, TriplePattern{node(subject), Variable{"p"}, Variable{"o"}})) {
        const Iri& p = row.at("p").node_iri();
        if (!only || only->count(p)) {
            out.push_back({graph, node(subject), p, row.at("o")});
        }
    }
}

void append_concept(const QuadStore& store, const Iri& graph, const Term& t, std::vector<Quad>& out) {
    if (t.is_node() && is_concept(store, graph, t.node_iri())) {
        append_outgoing(store, graph, t.node_iri(), out, &concept_predicates());
    }
}

std::vector<Iri> preference_nodes(const QuadStore& store, const Iri& graph, const Iri& stmt) {
    std::vector<Iri> out;
    for (const auto& row : store.match(graph, triple(Variable{"pref"}, vocab::pav_derivedFrom, node(stmt)))) {
        const auto& pref = row.at("pref");
        if (pref.is_node() &&
            !store.match(graph, triple(pref, vocab::rdf_type, node(vocab::pkg_Preference))).empty()) {
            out.push_back(pref.node_iri());
        }
    }
    return out;
}

std::vector<Term> objects(const QuadStore& store, const Iri& graph, const Iri& subject, const Iri& predicate) {
    std::vector<Term> out;
    for (const auto& row : store.match(graph, triple(node(subject), predicate, Variable{"o"}))) {
        out.push_back(row.at("o"));
    }
    return out;
}

bool referenced(const QuadStore& store, const Iri& graph, const Iri& c) {
    for (const auto* p : {&vocab::rdf_subject, &vocab::rdf_predicate, &vocab::rdf_object, &vocab::pkg_topic}) {
        if (!store.match(graph, triple(Variable{"x"}, *p, node(c))).empty()) {
            return true;
        }
    }
    return !store.match(graph, triple(node(c), vocab::pkg_preference, Variable{"x"})).empty();
}

std::string join_queries(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) {
            out += "\n\n";
        }
        out += p;
    }
    return out;
}

} // namespace

SelectQuery locate_query(const StatementPattern& pattern, const Iri& owner_graph) {
    SelectQuery q;
    q.projection = {"st"};
    q.graph = owner_graph;
    Variable st{"st"};
    q.where.push_back(triple(st, vocab::rdf_type, node(vocab::rdf_Statement)));
    auto add = [&](const std::optional<PatternElement>& element, const Iri& property, const std::string& var) {
        if (!element) {
            return;
        }
        if (const auto* iri = std::get_if<Iri>(&*element)) {
            q.where.push_back(triple(st, property, node(*iri)));
            return;
        }
        const auto& text = std::get<std::string>(*element);
        if (auto iri = literal_iri(text)) {
            q.where.push_back(triple(st, property, node(*iri)));
            return;
        }
        q.where.push_back(triple(st, property, Variable{var}));
        q.where.push_back(triple(Variable{var}, vocab::skos_prefLabel, Variable{var + "_label"}));
        q.filters.push_back(Filter{var + "_label", Term::literal(ascii_lower(text)), true});
    };
    add(pattern.subject, vocab::rdf_subject, "s");
    add(pattern.predicate, vocab::rdf_predicate, "p");
    add(pattern.object, vocab::rdf_object, "o");
    return q;
}

ParsedQuery build_query(const PkgAction& action, const Iri& owner_graph) {
    switch (action.intent) {
    case Intent::Add:
        if (const auto* stmt = std::get_if<PkgStatement>(&action.payload)) {
            return UpdateQuery{InsertData{statement_to_quads(*stmt, owner_graph)}};
        }
        throw UnsupportedAction("ADD needs a statement payload");
    case Intent::Get:
    case Intent::Delete:
        if (const auto* pattern = std::get_if<StatementPattern>(&action.payload)) {
            return locate_query(*pattern, owner_graph);
        }
        throw UnsupportedAction(std::string(to_string(action.intent)) + " needs a statement pattern");
    case Intent::Unknown:
        break;
    }
    throw UnsupportedAction("UNKNOWN intent cannot be executed");
}

std::vector<Iri> locate(const QuadStore& store, const StatementPattern& pattern, const Iri& owner_graph) {
    std::vector<Iri> ids;
    for (const auto& row : store.execute_select(locate_query(pattern, owner_graph)).rows) {
        ids.push_back(row.front().node_iri());
    }
    return ids;
}

ActionResult execute_action(QuadStore& store, const PkgAction& action, const Iri& owner_graph) {
    auto query = build_query(action, owner_graph);
    ActionResult r;
    r.intent = action.intent;
    if (action.intent == Intent::Add) {
        const auto& stmt = std::get<PkgStatement>(action.payload);
        if (!store.match(owner_graph, TriplePattern{node(stmt.id), Variable{"p"}, Variable{"o"}}).empty()) {
            throw StoreError("node already exists: " + stmt.id.str());
        }
        const auto& update = std::get<UpdateQuery>(query);
        r.query = to_sparql(update);
        store.execute_update(update);
        r.result = stmt.id;
        return r;
    }
    const auto& select = std::get<SelectQuery>(query);
    std::vector<Iri> ids;
    for (const auto& row : store.execute_select(select).rows) {
        ids.push_back(row.front().node_iri());
    }
    if (action.intent == Intent::Get) {
        r.query = to_sparql(select);
        r.result = fetch_statements(store, owner_graph, ids);
        return r;
    }
    auto outcome = delete_statements(store, owner_graph, ids);
    std::vector<std::string> texts = {to_sparql(select)};
    for (const auto& u : outcome.queries) {
        texts.push_back(to_sparql(u));
    }
    r.query = join_queries(texts);
    r.result = outcome.removed;
    return r;
}

std::vector<Quad> derive_preference_quads(const PkgStatement& stmt, const Iri& owner_graph) {
    if (!stmt.preference) {
        return {};
    }
    Preference pref = *stmt.preference;
    pref.holder = element_iri(stmt.subject);
    pref.derived_from = stmt.id;
    return preference_quads(pref, owner_graph);
}

std::vector<Quad> gather_statement_quads(const QuadStore& store, const Iri& owner_graph, const Iri& id) {
    std::vector<Quad> out;
    if (!is_statement(store, owner_graph, id)) {
        return out;
    }
    append_outgoing(store, owner_graph, id, out);
    for (const auto* p : {&vocab::rdf_subject, &vocab::rdf_predicate, &vocab::rdf_object}) {
        for (const auto& t : objects(store, owner_graph, id, *p)) {
            append_concept(store, owner_graph, t, out);
        }
    }
    for (const auto& pref : preference_nodes(store, owner_graph, id)) {
        append_outgoing(store, owner_graph, pref, out);
        for (const auto& row : store.match(owner_graph, triple(Variable{"h"}, vocab::pkg_preference, node(pref)))) {
            out.push_back({owner_graph, row.at("h"), vocab::pkg_preference, node(pref)});
        }
        for (const auto& t : objects(store, owner_graph, pref, vocab::pkg_topic)) {
            append_concept(store, owner_graph, t, out);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<PkgStatement> fetch_statement(const QuadStore& store, const Iri& owner_graph, const Iri& id) {
    auto quads = gather_statement_quads(store, owner_graph, id);
    if (quads.empty()) {
        return std::nullopt;
    }
    return quads_to_statement(quads, id);
}

std::vector<PkgStatement> fetch_statements(const QuadStore& store, const Iri& owner_graph,
                                           const std::vector<Iri>& ids) {
    std::vector<PkgStatement> out;
    for (const auto& id : ids) {
        if (auto st = fetch_statement(store, owner_graph, id)) {
            out.push_back(std::move(*st));
        }
    }
    return out;
}

DeleteOutcome delete_statements(QuadStore& store, const Iri& owner_graph, const std::vector<Iri>& ids) {
    DeleteOutcome outcome;
    auto run = [&](TriplePattern pattern) {
        UpdateQuery u{DeleteWhere{owner_graph, {std::move(pattern)}}};
        store.execute_update(u);
        outcome.queries.push_back(std::move(u));
    };
    std::set<Iri> candidates;
    std::set<Iri> done;
    for (const auto& id : ids) {
        if (!done.insert(id).second || !is_statement(store, owner_graph, id)) {
            continue;
        }
        for (const auto* p : {&vocab::rdf_subject, &vocab::rdf_predicate, &vocab::rdf_object}) {
            for (const auto& t : objects(store, owner_graph, id, *p)) {
                if (t.is_node() && is_concept(store, owner_graph, t.node_iri())) {
                    candidates.insert(t.node_iri());
                }
            }
        }
        for (const auto& pref : preference_nodes(store, owner_graph, id)) {
            for (const auto& t : objects(store, owner_graph, pref, vocab::pkg_topic)) {
                if (t.is_node() && is_concept(store, owner_graph, t.node_iri())) {
                    candidates.insert(t.node_iri());
                }
            }
            run(triple(Variable{"holder"}, vocab::pkg_preference, node(pref)));
            run(TriplePattern{node(pref), Variable{"p"}, Variable{"o"}});
        }
        run(TriplePattern{node(id), Variable{"p"}, Variable{"o"}});
        ++outcome.removed;
    }
    for (const auto& c : candidates) {
        if (!referenced(store, owner_graph, c)) {
            run(TriplePattern{node(c), Variable{"p"}, Variable{"o"}});
        }
    }
    return outcome;
}

void canonicalize_concepts(const QuadStore& store, const Iri& owner_graph, PkgStatement& stmt) {
    std::map<std::string, Concept> chosen;
    auto existing = [&](const std::string& key) -> std::optional<Concept> {
        SelectQuery q;
        q.projection = {"c"};
        q.graph = owner_graph;
        q.where = {triple(Variable{"c"}, vocab::rdf_type, node(vocab::skos_Concept)),
                   triple(Variable{"c"}, vocab::skos_prefLabel, Variable{"label"})};
        q.filters = {Filter{"label", Term::literal(key), true}};
        for (const auto& row : store.execute_select(q).rows) {
            std::vector<Quad> quads;
            append_concept(store, owner_graph, row.front(), quads);
            Concept c;
            c.id = row.front().node_iri();
            for (const auto& quad : quads) {
                if (quad.predicate == vocab::skos_prefLabel && quad.object.is_literal()) {
                    c.text = quad.object.str();
                } else if (quad.predicate == vocab::skos_related) {
                    c.related.insert(quad.object.node_iri());
                } else if (quad.predicate == vocab::skos_broader) {
                    c.broader.insert(quad.object.node_iri());
                } else if (quad.predicate == vocab::skos_narrower) {
                    c.narrower.insert(quad.object.node_iri());
                }
            }
            return c;
        }
        return std::nullopt;
    };
    auto canon = [&](SpoElement& element) {
        auto* c = std::get_if<Concept>(&element);
        if (!c) {
            return;
        }
        auto key = ascii_lower(c->text);
        auto it = chosen.find(key);
        if (it == chosen.end()) {
            it = chosen.emplace(key, existing(key).value_or(*c)).first;
        }
        *c = it->second;
    };
    canon(stmt.subject);
    canon(stmt.predicate);
    canon(stmt.object);
    if (stmt.preference) {
        canon(stmt.preference->topic);
        stmt.preference->holder = element_iri(stmt.subject);
    }
}

void replace_access(QuadStore& store, const Iri& owner_graph, const Iri& id, const AccessPolicy& policy) {
    if (!is_statement(store, owner_graph, id)) {
        throw StoreError("no such statement: " + id.str());
    }
    std::vector<Violation> violations;
    for (const auto& [field, set] : {std::pair{"read", &policy.read}, {"write", &policy.write}}) {
        for (const auto& agent : *set) {
            if (!agent.valid()) {
                violations.push_back({std::string("access.") + field, "not a valid absolute IRI: '" + agent.str() + "'"});
            } else if (agent == owner_graph) {
                violations.push_back({std::string("access.") + field, "owner is implicitly authorized and may not be listed"});
            }
        }
    }
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    std::vector<Quad> old;
    std::vector<Quad> fresh;
    for (const auto* p : {&vocab::pkg_readAccessRights, &vocab::pkg_writeAccessRights}) {
        for (const auto& t : objects(store, owner_graph, id, *p)) {
            old.push_back({owner_graph, node(id), *p, t});
        }
    }
    for (const auto& agent : policy.read) {
        fresh.push_back({owner_graph, node(id), vocab::pkg_readAccessRights, node(agent)});
    }
    for (const auto& agent : policy.write) {
        fresh.push_back({owner_graph, node(id), vocab::pkg_writeAccessRights, node(agent)});
    }
    store.erase(old);
    store.insert(fresh);
}

} // namespace pkg
