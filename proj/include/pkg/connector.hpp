#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pkg/linking.hpp"
#include "pkg/nl2pkg.hpp"
#include "pkg/sparql.hpp"
#include "pkg/store.hpp"
#include "pkg/vocabulary.hpp"

namespace pkg {

/// ADD carries a statement, GET/DELETE a pattern, UNKNOWN nothing.
struct PkgAction {
    Intent intent = Intent::Unknown;
    std::variant<std::monostate, PkgStatement, StatementPattern> payload;

    static PkgAction add(PkgStatement stmt) { return {Intent::Add, std::move(stmt)}; }
    static PkgAction get(StatementPattern pattern) { return {Intent::Get, std::move(pattern)}; }
    static PkgAction remove(StatementPattern pattern) { return {Intent::Delete, std::move(pattern)}; }
};

/// Statement ids whose subject, predicate and object match the pattern. IRIs
/// match exactly; text matches a concept label case-insensitively, or an IRI
/// spelled out in full.
SelectQuery locate_query(const StatementPattern& pattern, const Iri& owner_graph);

/// ADD -> INSERT DATA; GET and DELETE -> the locating SELECT. Throws
/// UnsupportedAction for UNKNOWN or a payload that does not fit the intent.
ParsedQuery build_query(const PkgAction& action, const Iri& owner_graph);

struct ActionResult {
    Intent intent = Intent::Unknown;
    /// Every query that ran, in SPARQL text, separated by blank lines.
    std::string query;
    /// ADD: the statement id; GET: the statements; DELETE: removed count.
    std::variant<Iri, std::vector<PkgStatement>, std::size_t> result;
};

ActionResult execute_action(QuadStore& store, const PkgAction& action, const Iri& owner_graph);

/// The five preference quads with holder = subject and derivedFrom = id; empty
/// without a preference.
std::vector<Quad> derive_preference_quads(const PkgStatement& stmt, const Iri& owner_graph);

std::vector<Iri> locate(const QuadStore& store, const StatementPattern& pattern, const Iri& owner_graph);

/// The statement node plus the concept and preference nodes it reaches.
std::vector<Quad> gather_statement_quads(const QuadStore& store, const Iri& owner_graph, const Iri& id);
/// Empty when `id` is not a statement of the graph.
std::optional<PkgStatement> fetch_statement(const QuadStore& store, const Iri& owner_graph, const Iri& id);
std::vector<PkgStatement> fetch_statements(const QuadStore& store, const Iri& owner_graph,
                                           const std::vector<Iri>& ids);

struct DeleteOutcome {
    std::size_t removed = 0;
    std::vector<UpdateQuery> queries;
};

/// Removes each statement with its preference, then every concept it used
/// that nothing else in the graph still points at.
DeleteOutcome delete_statements(QuadStore& store, const Iri& owner_graph, const std::vector<Iri>& ids);

/// Replaces the statement's concepts with existing concepts of the graph that
/// carry the same label (case-insensitive), so repeated mentions share a node.
void canonicalize_concepts(const QuadStore& store, const Iri& owner_graph, PkgStatement& stmt);

/// Replaces the statement's access quads. Throws StoreError for an unknown id.
void replace_access(QuadStore& store, const Iri& owner_graph, const Iri& id, const AccessPolicy& policy);

} // namespace pkg
