#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pkg/rdf.hpp"

namespace pkg {

struct Variable {
    std::string name;

    auto operator<=>(const Variable&) const = default;
    bool operator==(const Variable&) const = default;
};

using PatternTerm = std::variant<Variable, Term>;

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;

    bool operator==(const TriplePattern&) const = default;
};

/// `?var = term`, or with `case_insensitive` set, `LCASE(STR(?var)) = "value"`
/// where `value` is compared against the ASCII-lowered STR of the binding.
struct Filter {
    std::string variable;
    Term value;
    bool case_insensitive = false;

    bool operator==(const Filter&) const = default;
};

struct SelectQuery {
    /// Empty means every variable, in order of first appearance.
    std::vector<std::string> projection;
    Iri graph;
    std::vector<TriplePattern> where;
    std::vector<Filter> filters;

    bool operator==(const SelectQuery&) const = default;
};

struct InsertData {
    std::vector<Quad> quads;
    bool operator==(const InsertData&) const = default;
};

struct DeleteWhere {
    Iri graph;
    std::vector<TriplePattern> where;
    bool operator==(const DeleteWhere&) const = default;
};

struct UpdateQuery {
    std::variant<InsertData, DeleteWhere> op;
    bool operator==(const UpdateQuery&) const = default;
};

using Binding = std::map<std::string, Term>;

struct ResultTable {
    std::vector<std::string> variables;
    std::vector<std::vector<Term>> rows;

    bool operator==(const ResultTable&) const = default;
};

/// Variables of a BGP in order of first appearance.
std::vector<std::string> pattern_variables(std::span<const TriplePattern> where);

/// In-memory quad store: one named graph per registered owner, each with SPO,
/// POS and OSP indexes over interned terms and its own reader/writer lock.
class QuadStore {
public:
    QuadStore();
    ~QuadStore();
    QuadStore(const QuadStore&) = delete;
    QuadStore& operator=(const QuadStore&) = delete;

    /// Idempotent.
    void register_graph(const Iri& graph);
    bool has_graph(const Iri& graph) const;
    std::vector<Iri> graphs() const;

    std::uint64_t revision() const noexcept { return revision_.load(); }

    /// Set semantics; the revision moves only when something was added.
    /// Throws StoreError (nothing inserted) if any quad is malformed or targets
    /// an unregistered graph.
    std::uint64_t insert(std::span<const Quad> quads);
    std::uint64_t erase(std::span<const Quad> quads);

    std::vector<Binding> match(const Iri& graph, const TriplePattern& pattern) const;
    std::vector<Quad> quads(const Iri& graph) const;
    std::size_t size(const Iri& graph) const;

    /// Natural join of the BGP plus filters; distinct rows sorted by the
    /// N-Triples rendering of their terms. Throws StoreError when malformed.
    ResultTable execute_select(const SelectQuery& query) const;
    std::uint64_t execute_update(const UpdateQuery& query);

    // Per-graph storage; defined in store.cpp.
    struct Graph;

private:
    std::shared_ptr<Graph> find(const Iri& graph) const;
    std::shared_ptr<Graph> require(const Iri& graph) const;

    mutable std::shared_mutex registry_mutex_;
    std::map<Iri, std::shared_ptr<Graph>> graphs_;
    std::atomic<std::uint64_t> revision_{0};
};

/// Throws StoreError describing the first problem with the query.
void validate_select(const SelectQuery& query);

} // namespace pkg
