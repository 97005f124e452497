#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pkg/clock.hpp"
#include "pkg/error.hpp"
#include "pkg/rdf.hpp"

namespace pkg {

/// SKOS placeholder for an SPO element that could not be linked to an IRI.
struct Concept {
    Iri id;
    std::string text;
    std::set<Iri> related;
    std::set<Iri> broader;
    std::set<Iri> narrower;

    bool operator==(const Concept&) const = default;
};

/// Either a resolved IRI or a concept carrying the surface text.
using SpoElement = std::variant<Iri, Concept>;

/// The node an element contributes to the reified statement.
Term element_term(const SpoElement& element);
/// Resolved IRI or the concept's id.
const Iri& element_iri(const SpoElement& element);
inline bool is_concept(const SpoElement& element) { return std::holds_alternative<Concept>(element); }

struct Provenance {
    Iri created_by;
    Timestamp created_on;
    std::optional<Iri> derived_from;

    bool operator==(const Provenance&) const = default;
};

/// Service agents granted access. The owner is implicit and never listed.
struct AccessPolicy {
    std::set<Iri> read;
    std::set<Iri> write;

    bool operator==(const AccessPolicy&) const = default;
};

struct Preference {
    Iri id;
    Iri holder;
    SpoElement topic;
    double weight = 0.0;
    Iri derived_from;

    bool operator==(const Preference&) const = default;
};

struct PkgStatement {
    Iri id;
    std::string annotation;
    SpoElement subject;
    SpoElement predicate;
    SpoElement object;
    Provenance provenance;
    AccessPolicy access;
    std::optional<Preference> preference;

    bool operator==(const PkgStatement&) const = default;
};

/// Canonical `xsd:decimal` lexical form of a preference weight. Always signed
/// and always carrying a fractional part: `+1.0`, `-1.0`, `+0.25`, `0.0`.
std::string format_weight(double weight);
std::optional<double> parse_weight(std::string_view lexical);

struct ValidationContext {
    /// When set, the owner may not appear in access sets.
    std::optional<Iri> owner;
    /// When set, createdOn may not be later than this instant.
    std::optional<Timestamp> now;
};

/// Every violated invariant, each tagged with its field path. Empty iff valid.
std::vector<Violation> validate_statement(const PkgStatement& stmt, const ValidationContext& ctx = {});

/// Quads of the concept node: type, label, scheme membership and SKOS links.
std::vector<Quad> concept_quads(const Concept& c, const Iri& owner_graph);

/// holder -> preference node -> {type, topic, weight, derivedFrom}.
std::vector<Quad> preference_quads(const Preference& pref, const Iri& owner_graph);

/// Reifies the statement into the owner graph. Throws ValidationError.
std::vector<Quad> statement_to_quads(const PkgStatement& stmt, const Iri& owner_graph);

/// Inverse of statement_to_quads. `quads` may contain unrelated data; only
/// what hangs off `statement_id` is read. Throws StructuralError naming the
/// missing pieces (e.g. "rdf:subject").
PkgStatement quads_to_statement(std::span<const Quad> quads, const Iri& statement_id);

} // namespace pkg
