#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace pkg::testing {

ResultTable brute_force_select(const std::vector<Quad>& graph_quads, const SelectQuery& query) {
    std::set<std::tuple<Term, Term, Term>> triples;
    std::set<Term> domain;
    for (const auto& q : graph_quads) {
        if (q.graph != query.graph) {
            continue;
        }
        Term p = Term::iri(q.predicate);
        triples.emplace(q.subject, p, q.object);
        domain.insert(q.subject);
        domain.insert(p);
        domain.insert(q.object);
    }
    std::vector<std::string> vars;
    auto note = [&](const PatternTerm& t) {
        if (const auto* v = std::get_if<Variable>(&t)) {
            if (std::find(vars.begin(), vars.end(), v->name) == vars.end()) {
                vars.push_back(v->name);
            }
        }
    };
    for (const auto& tp : query.where) {
        note(tp.subject);
        note(tp.predicate);
        note(tp.object);
    }
    ResultTable table;
    table.variables = query.projection.empty() ? vars : query.projection;
    std::vector<Term> dom(domain.begin(), domain.end());
    std::set<std::vector<std::string>> seen;
    std::vector<std::pair<std::vector<std::string>, std::vector<Term>>> rows;

    std::map<std::string, Term> assignment;
    auto value = [&](const PatternTerm& t) -> const Term& {
        if (const auto* v = std::get_if<Variable>(&t)) {
            return assignment.at(v->name);
        }
        return std::get<Term>(t);
    };
    auto accept = [&] {
        for (const auto& tp : query.where) {
            if (!triples.count({value(tp.subject), value(tp.predicate), value(tp.object)})) {
                return false;
            }
        }
        for (const auto& f : query.filters) {
            const Term& bound = assignment.at(f.variable);
            if (f.case_insensitive) {
                if (ascii_lower(bound.str()) != f.value.str()) {
                    return false;
                }
            } else if (!(bound == f.value)) {
                return false;
            }
        }
        return true;
    };
    std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
        if (i == vars.size()) {
            if (!accept()) {
                return;
            }
            std::vector<std::string> key;
            std::vector<Term> row;
            for (const auto& name : table.variables) {
                key.push_back(to_ntriples(assignment.at(name)));
                row.push_back(assignment.at(name));
            }
            if (seen.insert(key).second) {
                rows.emplace_back(std::move(key), std::move(row));
            }
            return;
        }
        for (const auto& t : dom) {
            assignment[vars[i]] = t;
            enumerate(i + 1);
        }
    };
    if (!dom.empty() || vars.empty()) {
        enumerate(0);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [key, row] : rows) {
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::size_t expected_quad_count(const PkgStatement& stmt) {
    // type, description, subject, predicate, object, owner, createdBy, createdOn
    std::size_t n = 8;
    if (stmt.provenance.derived_from) {
        ++n;
    }
    n += stmt.access.read.size() + stmt.access.write.size();
    std::map<Iri, const Concept*> concepts;
    auto note = [&](const SpoElement& e) {
        if (const auto* c = std::get_if<Concept>(&e)) {
            concepts.emplace(c->id, c);
        }
    };
    note(stmt.subject);
    note(stmt.predicate);
    note(stmt.object);
    if (stmt.preference) {
        note(stmt.preference->topic);
        // holder link, type, topic, weight, derivedFrom
        n += 5;
    }
    for (const auto& [id, c] : concepts) {
        // type, label, scheme
        n += 3 + c->related.size() + c->broader.size() + c->narrower.size();
    }
    return n;
}

std::set<Iri> referenced_concepts(const std::vector<PkgStatement>& statements) {
    std::set<Iri> out;
    for (const auto& st : statements) {
        for (const auto* e : {&st.subject, &st.predicate, &st.object}) {
            if (const auto* c = std::get_if<Concept>(e)) {
                out.insert(c->id);
            }
        }
        if (st.preference) {
            if (const auto* c = std::get_if<Concept>(&st.preference->topic)) {
                out.insert(c->id);
            }
        }
    }
    return out;
}

std::set<Iri> scan_pattern(const std::vector<PkgStatement>& statements, const StatementPattern& pattern) {
    auto matches = [](const std::optional<PatternElement>& want, const SpoElement& have) {
        if (!want) {
            return true;
        }
        if (const auto* iri = std::get_if<Iri>(&*want)) {
            return element_iri(have) == *iri;
        }
        const auto& text = std::get<std::string>(*want);
        if (const auto* c = std::get_if<Concept>(&have)) {
            return ascii_lower(c->text) == ascii_lower(text);
        }
        return std::get<Iri>(have).str() == text;
    };
    std::set<Iri> out;
    for (const auto& st : statements) {
        if (matches(pattern.subject, st.subject) && matches(pattern.predicate, st.predicate) &&
            matches(pattern.object, st.object)) {
            out.insert(st.id);
        }
    }
    return out;
}

} // namespace pkg::testing
