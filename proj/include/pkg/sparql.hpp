#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "pkg/store.hpp"

namespace pkg {

using ParsedQuery = std::variant<SelectQuery, UpdateQuery>;

/// Parses the SPARQL subset:
///   [PREFIX p: <iri>]* SELECT (* | ?v ...) [FROM <g>] [WHERE] { [GRAPH <g> {] patterns [}] }
///   INSERT DATA { GRAPH <g> { ground triples } ... }
///   DELETE WHERE { GRAPH <g> { patterns } }
/// Patterns are triples (with `;` and `,` lists) and FILTER(?v = term) or
/// FILTER(LCASE(STR(?v)) = "text"). Keywords are case-insensitive. A SELECT
/// without FROM or GRAPH runs against `default_graph`. Throws ParseError.
ParsedQuery parse_sparql(std::string_view text, const std::optional<Iri>& default_graph = std::nullopt);

std::string to_sparql(const SelectQuery& query);
std::string to_sparql(const UpdateQuery& query);

} // namespace pkg
