#include "pkg/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace pkg {

namespace {

bool blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

void check_iri(std::vector<Violation>& out, const Iri& iri, const std::string& field) {
    if (!iri.valid()) {
        out.push_back({field, "not a valid absolute IRI: '" + iri.str() + "'"});
    }
}

void check_element(std::vector<Violation>& out, const SpoElement& element, const std::string& field) {
    if (const auto* iri = std::get_if<Iri>(&element)) {
        check_iri(out, *iri, field);
        return;
    }
    const auto& c = std::get<Concept>(element);
    check_iri(out, c.id, field + ".concept.id");
    if (blank(c.text)) {
        out.push_back({field + ".concept.text", "concept text must not be empty"});
    }
    for (const auto& [name, links] : {std::pair{"related", &c.related}, {"broader", &c.broader},
                                      {"narrower", &c.narrower}}) {
        for (const auto& link : *links) {
            check_iri(out, link, field + ".concept." + name);
        }
    }
}

void check_access_set(std::vector<Violation>& out, const std::set<Iri>& set, const std::string& field,
                      const std::optional<Iri>& owner) {
    for (const auto& agent : set) {
        check_iri(out, agent, field);
        if (owner && agent == *owner) {
            out.push_back({field, "owner is implicitly authorized and may not be listed"});
        }
    }
}

std::vector<const Concept*> statement_concepts(const PkgStatement& stmt) {
    std::vector<const Concept*> out;
    for (const auto* e : {&stmt.subject, &stmt.predicate, &stmt.object}) {
        if (const auto* c = std::get_if<Concept>(e)) {
            out.push_back(c);
        }
    }
    if (stmt.preference) {
        if (const auto* c = std::get_if<Concept>(&stmt.preference->topic)) {
            out.push_back(c);
        }
    }
    return out;
}

class QuadSink {
public:
    explicit QuadSink(const Iri& graph) : graph_(graph) {}

    void add(const Term& s, const Iri& p, const Term& o) {
        Quad q{graph_, s, p, o};
        if (seen_.insert(q).second) {
            quads_.push_back(std::move(q));
        }
    }
    void add_all(const std::vector<Quad>& quads) {
        for (const auto& q : quads) {
            add(q.subject, q.predicate, q.object);
        }
    }
    std::vector<Quad> take() { return std::move(quads_); }

private:
    const Iri& graph_;
    std::set<Quad> seen_;
    std::vector<Quad> quads_;
};

// subject -> (predicate, object) pairs
using Outgoing = std::map<Term, std::vector<std::pair<Iri, Term>>>;

std::vector<Term> objects_of(const Outgoing& out, const Term& subject, const Iri& predicate) {
    std::vector<Term> result;
    auto it = out.find(subject);
    if (it == out.end()) {
        return result;
    }
    for (const auto& [p, o] : it->second) {
        if (p == predicate) {
            result.push_back(o);
        }
    }
    return result;
}

bool has_edge(const Outgoing& out, const Term& subject, const Iri& predicate, const Term& object) {
    for (const auto& o : objects_of(out, subject, predicate)) {
        if (o == object) {
            return true;
        }
    }
    return false;
}

struct Reader {
    const Outgoing& out;
    std::vector<std::string>& missing;

    std::optional<Term> single(const Term& subject, const Iri& predicate, const std::string& name) {
        auto values = objects_of(out, subject, predicate);
        if (values.empty()) {
            missing.push_back(name);
            return std::nullopt;
        }
        if (values.size() > 1) {
            missing.push_back(name + " (multiple values)");
            return std::nullopt;
        }
        return values.front();
    }

    std::optional<Iri> single_node(const Term& subject, const Iri& predicate, const std::string& name) {
        auto t = single(subject, predicate, name);
        if (!t) {
            return std::nullopt;
        }
        if (!t->is_node()) {
            missing.push_back(name + " (literal where a node is required)");
            return std::nullopt;
        }
        return t->node_iri();
    }

    std::optional<std::string> single_literal(const Term& subject, const Iri& predicate, const std::string& name) {
        auto t = single(subject, predicate, name);
        if (!t) {
            return std::nullopt;
        }
        if (!t->is_literal()) {
            missing.push_back(name + " (node where a literal is required)");
            return std::nullopt;
        }
        return t->as_literal().lexical;
    }

    std::set<Iri> node_set(const Term& subject, const Iri& predicate, const std::string& name) {
        std::set<Iri> result;
        for (const auto& o : objects_of(out, subject, predicate)) {
            if (o.is_node()) {
                result.insert(o.node_iri());
            } else {
                missing.push_back(name + " (literal where a node is required)");
            }
        }
        return result;
    }

    std::optional<SpoElement> element(const Term& subject, const Iri& predicate, const std::string& name) {
        auto node = single_node(subject, predicate, name);
        if (!node) {
            return std::nullopt;
        }
        Term node_term = Term::iri(*node);
        if (!has_edge(out, node_term, vocab::rdf_type, Term::iri(vocab::skos_Concept))) {
            return SpoElement{*node};
        }
        Concept c;
        c.id = *node;
        auto label = single_literal(node_term, vocab::skos_prefLabel, "skos:prefLabel");
        if (!label) {
            return std::nullopt;
        }
        c.text = *label;
        c.related = node_set(node_term, vocab::skos_related, "skos:related");
        c.broader = node_set(node_term, vocab::skos_broader, "skos:broader");
        c.narrower = node_set(node_term, vocab::skos_narrower, "skos:narrower");
        return SpoElement{std::move(c)};
    }
};

} // namespace

Term element_term(const SpoElement& element) { return Term::iri(element_iri(element)); }

const Iri& element_iri(const SpoElement& element) {
    if (const auto* iri = std::get_if<Iri>(&element)) {
        return *iri;
    }
    return std::get<Concept>(element).id;
}

std::string format_weight(double weight) {
    if (weight == 0.0 || std::isnan(weight)) {
        return "0.0";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(weight), std::chars_format::fixed);
    std::string digits(buf, ec == std::errc{} ? end : buf);
    if (digits.find('.') == std::string::npos) {
        digits += ".0";
    }
    return (weight < 0 ? "-" : "+") + digits;
}

std::optional<double> parse_weight(std::string_view lexical) {
    std::string_view body = lexical;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    if (body.empty()) {
        return std::nullopt;
    }
    std::size_t digits = 0;
    bool dot = false;
    for (char c : body) {
        if (c == '.') {
            if (dot) {
                return std::nullopt;
            }
            dot = true;
        } else if (c >= '0' && c <= '9') {
            ++digits;
        } else {
            return std::nullopt;
        }
    }
    if (digits == 0) {
        return std::nullopt;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value, std::chars_format::fixed);
    if (ec != std::errc{} || ptr != body.data() + body.size()) {
        return std::nullopt;
    }
    return negative ? -value : value;
}

std::vector<Violation> validate_statement(const PkgStatement& stmt, const ValidationContext& ctx) {
    std::vector<Violation> out;
    check_iri(out, stmt.id, "id");
    if (blank(stmt.annotation)) {
        out.push_back({"annotation", "a statement needs its natural-language text"});
    }
    check_element(out, stmt.subject, "subject");
    check_element(out, stmt.predicate, "predicate");
    check_element(out, stmt.object, "object");

    check_iri(out, stmt.provenance.created_by, "provenance.createdBy");
    if (stmt.provenance.derived_from) {
        check_iri(out, *stmt.provenance.derived_from, "provenance.derivedFrom");
    }
    if (ctx.now && stmt.provenance.created_on > *ctx.now) {
        out.push_back({"provenance.createdOn", "creation time lies in the future"});
    }

    check_access_set(out, stmt.access.read, "access.read", ctx.owner);
    check_access_set(out, stmt.access.write, "access.write", ctx.owner);

    if (const auto& pref = stmt.preference) {
        check_iri(out, pref->id, "preference.id");
        if (!std::isfinite(pref->weight) || pref->weight < -1.0 || pref->weight > 1.0) {
            out.push_back({"preference.weight", "weight must lie in [-1, 1]"});
        }
        if (pref->derived_from != stmt.id) {
            out.push_back({"preference.derivedFrom", "must reference the statement it is derived from"});
        }
        if (pref->holder != element_iri(stmt.subject)) {
            out.push_back({"preference.holder", "must be the statement's subject"});
        }
        check_element(out, pref->topic, "preference.topic");
        if (pref->id == stmt.id) {
            out.push_back({"preference.id", "collides with the statement id"});
        }
    }

    std::map<Iri, const Concept*> seen;
    for (const auto* c : statement_concepts(stmt)) {
        if (c->id == stmt.id || (stmt.preference && c->id == stmt.preference->id)) {
            out.push_back({"concepts", "concept id collides with another node: " + c->id.str()});
        }
        auto [it, fresh] = seen.emplace(c->id, c);
        if (!fresh && !(*it->second == *c)) {
            out.push_back({"concepts", "conflicting definitions for concept " + c->id.str()});
        }
    }
    return out;
}

std::vector<Quad> concept_quads(const Concept& c, const Iri& owner_graph) {
    QuadSink sink(owner_graph);
    Term node = Term::iri(c.id);
    sink.add(node, vocab::rdf_type, Term::iri(vocab::skos_Concept));
    sink.add(node, vocab::skos_prefLabel, Term::literal(c.text));
    sink.add(node, vocab::skos_inScheme, Term::iri(owner_graph));
    for (const auto& iri : c.related) {
        sink.add(node, vocab::skos_related, Term::iri(iri));
    }
    for (const auto& iri : c.broader) {
        sink.add(node, vocab::skos_broader, Term::iri(iri));
    }
    for (const auto& iri : c.narrower) {
        sink.add(node, vocab::skos_narrower, Term::iri(iri));
    }
    return sink.take();
}

std::vector<Quad> preference_quads(const Preference& pref, const Iri& owner_graph) {
    QuadSink sink(owner_graph);
    Term node = Term::iri(pref.id);
    sink.add(Term::iri(pref.holder), vocab::pkg_preference, node);
    sink.add(node, vocab::rdf_type, Term::iri(vocab::pkg_Preference));
    sink.add(node, vocab::pkg_topic, element_term(pref.topic));
    sink.add(node, vocab::pkg_weight, Term::literal(format_weight(pref.weight), vocab::xsd_decimal));
    sink.add(node, vocab::pav_derivedFrom, Term::iri(pref.derived_from));
    return sink.take();
}

std::vector<Quad> statement_to_quads(const PkgStatement& stmt, const Iri& owner_graph) {
    auto violations = validate_statement(stmt, ValidationContext{owner_graph, std::nullopt});
    check_iri(violations, owner_graph, "graph");
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }

    QuadSink sink(owner_graph);
    Term st = Term::iri(stmt.id);
    sink.add(st, vocab::rdf_type, Term::iri(vocab::rdf_Statement));
    sink.add(st, vocab::dcterms_description, Term::literal(stmt.annotation));
    sink.add(st, vocab::rdf_subject, element_term(stmt.subject));
    sink.add(st, vocab::rdf_predicate, element_term(stmt.predicate));
    sink.add(st, vocab::rdf_object, element_term(stmt.object));
    sink.add(st, vocab::pkg_owner, Term::iri(owner_graph));
    sink.add(st, vocab::pav_createdBy, Term::iri(stmt.provenance.created_by));
    sink.add(st, vocab::pav_createdOn,
             Term::literal(format_timestamp(stmt.provenance.created_on), vocab::xsd_dateTime));
    if (stmt.provenance.derived_from) {
        sink.add(st, vocab::pav_derivedFrom, Term::iri(*stmt.provenance.derived_from));
    }
    for (const auto& agent : stmt.access.read) {
        sink.add(st, vocab::pkg_readAccessRights, Term::iri(agent));
    }
    for (const auto& agent : stmt.access.write) {
        sink.add(st, vocab::pkg_writeAccessRights, Term::iri(agent));
    }
    for (const auto* c : statement_concepts(stmt)) {
        sink.add_all(concept_quads(*c, owner_graph));
    }
    if (stmt.preference) {
        sink.add_all(preference_quads(*stmt.preference, owner_graph));
    }
    return sink.take();
}

PkgStatement quads_to_statement(std::span<const Quad> quads, const Iri& statement_id) {
    Outgoing out;
    for (const auto& q : quads) {
        out[q.subject].emplace_back(q.predicate, q.object);
    }
    std::vector<std::string> missing;
    Reader read{out, missing};
    Term st = Term::iri(statement_id);

    PkgStatement stmt;
    stmt.id = statement_id;
    if (!has_edge(out, st, vocab::rdf_type, Term::iri(vocab::rdf_Statement))) {
        missing.push_back("rdf:type");
    }
    auto annotation = read.single_literal(st, vocab::dcterms_description, "dcterms:description");
    auto subject = read.element(st, vocab::rdf_subject, "rdf:subject");
    auto predicate = read.element(st, vocab::rdf_predicate, "rdf:predicate");
    auto object = read.element(st, vocab::rdf_object, "rdf:object");
    auto created_by = read.single_node(st, vocab::pav_createdBy, "pav:createdBy");
    auto created_on = read.single_literal(st, vocab::pav_createdOn, "pav:createdOn");
    std::optional<Timestamp> created_ts;
    if (created_on) {
        created_ts = parse_timestamp(*created_on);
        if (!created_ts) {
            missing.push_back("pav:createdOn (malformed timestamp)");
        }
    }
    auto derived = objects_of(out, st, vocab::pav_derivedFrom);
    if (derived.size() > 1) {
        missing.push_back("pav:derivedFrom (multiple values)");
    } else if (derived.size() == 1) {
        if (derived.front().is_node()) {
            stmt.provenance.derived_from = derived.front().node_iri();
        } else {
            missing.push_back("pav:derivedFrom (literal where a node is required)");
        }
    }
    stmt.access.read = read.node_set(st, vocab::pkg_readAccessRights, "pkg:readAccessRights");
    stmt.access.write = read.node_set(st, vocab::pkg_writeAccessRights, "pkg:writeAccessRights");

    // Preference nodes point back at the statement through pav:derivedFrom.
    std::vector<Iri> pref_nodes;
    for (const auto& q : quads) {
        if (q.predicate == vocab::pav_derivedFrom && q.object == st && q.subject.is_node() &&
            has_edge(out, q.subject, vocab::rdf_type, Term::iri(vocab::pkg_Preference))) {
            pref_nodes.push_back(q.subject.node_iri());
        }
    }
    std::sort(pref_nodes.begin(), pref_nodes.end());
    pref_nodes.erase(std::unique(pref_nodes.begin(), pref_nodes.end()), pref_nodes.end());
    if (pref_nodes.size() > 1) {
        missing.push_back("pkg:Preference (multiple values)");
    } else if (pref_nodes.size() == 1) {
        Term node = Term::iri(pref_nodes.front());
        std::vector<Iri> holders;
        for (const auto& q : quads) {
            if (q.predicate == vocab::pkg_preference && q.object == node && q.subject.is_node()) {
                holders.push_back(q.subject.node_iri());
            }
        }
        std::sort(holders.begin(), holders.end());
        holders.erase(std::unique(holders.begin(), holders.end()), holders.end());
        if (holders.size() != 1) {
            missing.push_back(holders.empty() ? "pkg:preference" : "pkg:preference (multiple values)");
        }
        auto topic = read.element(node, vocab::pkg_topic, "pkg:topic");
        auto weight_text = read.single_literal(node, vocab::pkg_weight, "pkg:weight");
        std::optional<double> weight;
        if (weight_text) {
            weight = parse_weight(*weight_text);
            if (!weight) {
                missing.push_back("pkg:weight (malformed decimal)");
            }
        }
        if (holders.size() == 1 && topic && weight) {
            stmt.preference = Preference{pref_nodes.front(), holders.front(), std::move(*topic), *weight, statement_id};
        }
    }

    if (!missing.empty()) {
        throw StructuralError(std::move(missing));
    }
    stmt.annotation = std::move(*annotation);
    stmt.subject = std::move(*subject);
    stmt.predicate = std::move(*predicate);
    stmt.object = std::move(*object);
    stmt.provenance.created_by = std::move(*created_by);
    stmt.provenance.created_on = *created_ts;
    return stmt;
}

} // namespace pkg
