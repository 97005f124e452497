#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkg/rdf.hpp"
#include "pkg/store.hpp"

namespace pkg {

/// Parses the supported Turtle subset into quads of `graph`: @prefix/PREFIX,
/// IRIs, prefixed names, plain/typed/language literals, numbers, booleans,
/// `a`, and `;`/`,` lists. Blank nodes, collections and @base are rejected.
/// Throws ParseError with line and column.
std::vector<Quad> parse_turtle(std::string_view text, const Iri& graph);

/// Deterministic Turtle: every namespace-table prefix is declared, subjects,
/// predicates and objects appear in N-Triples order. Graph names are ignored.
std::string write_turtle(std::span<const Quad> quads);

/// Throws StoreError for an unregistered graph.
std::string export_turtle(const QuadStore& store, const Iri& graph);
/// Parses fully before touching the store, so a syntax error changes nothing.
std::uint64_t import_turtle(QuadStore& store, const Iri& graph, std::string_view text);

} // namespace pkg
