#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pkg {

/// True for a syntactically valid absolute IRI: a scheme followed by ':' and a
/// non-empty remainder free of whitespace, controls and the characters
/// forbidden inside an IRIREF.
bool is_valid_iri(std::string_view text) noexcept;

/// Absolute IRI. Construction does not validate so that decoders can carry
/// bad input up to the validators, which report the offending field.
class Iri {
public:
    Iri() = default;
    explicit Iri(std::string value) : value_(std::move(value)) {}

    /// Throws ValidationError naming `field` when `value` is not a valid IRI.
    static Iri checked(std::string value, std::string_view field = "iri");

    const std::string& str() const noexcept { return value_; }
    bool valid() const noexcept { return is_valid_iri(value_); }
    bool empty() const noexcept { return value_.empty(); }

    auto operator<=>(const Iri&) const = default;
    bool operator==(const Iri&) const = default;

private:
    std::string value_;
};

std::ostream& operator<<(std::ostream& os, const Iri& iri);

/// Engine-minted node identifier of the form `<namespace>/<kind>/<uuid>`.
struct Skolem {
    Iri iri;

    auto operator<=>(const Skolem&) const = default;
    bool operator==(const Skolem&) const = default;
};

/// True when `iri` has the shape of a minted skolem IRI
/// (`.../stmt/<uuid>`, `.../concept/<uuid>` or `.../pref/<uuid>`).
bool looks_like_skolem(std::string_view iri) noexcept;

struct Literal {
    std::string lexical;
    Iri datatype;
    std::optional<std::string> language;

    auto operator<=>(const Literal&) const = default;
    bool operator==(const Literal&) const = default;
};

class Term {
public:
    enum class Kind { Iri, Skolem, Literal };

    Term() : value_(pkg::Iri{}) {}

    /// An IRI node. IRIs with the minted skolem shape become skolem terms, so
    /// the kind is a function of the IRI text and survives serialization.
    static Term iri(Iri iri);
    static Term iri(std::string iri) { return Term::iri(Iri{std::move(iri)}); }
    /// Throws ValidationError unless `iri` has the skolem shape.
    static Term skolem(Iri iri);
    static Term literal(std::string lexical);
    static Term literal(std::string lexical, Iri datatype);
    static Term lang_literal(std::string lexical, std::string language);

    Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
    bool is_literal() const noexcept { return kind() == Kind::Literal; }
    bool is_node() const noexcept { return !is_literal(); }

    /// IRI of an IRI or skolem term. Throws std::bad_variant_access on literals.
    const Iri& node_iri() const;
    const Literal& as_literal() const { return std::get<Literal>(value_); }

    /// The SPARQL STR() value: the IRI text or the literal's lexical form.
    const std::string& str() const;

    bool operator==(const Term&) const = default;
    auto operator<=>(const Term&) const = default;

private:
    explicit Term(std::variant<Iri, Skolem, Literal> v) : value_(std::move(v)) {}

    std::variant<pkg::Iri, Skolem, Literal> value_;
};

/// N-Triples style rendering: `<iri>`, `"lex"`, `"lex"@en`, `"lex"^^<dt>`.
std::string to_ntriples(const Term& term);
std::string escape_string_literal(std::string_view text);
std::ostream& operator<<(std::ostream& os, const Term& term);

struct Quad {
    Iri graph;
    Term subject;
    Iri predicate;
    Term object;

    bool operator==(const Quad&) const = default;
    auto operator<=>(const Quad&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Quad& quad);

/// Prefix table used for every vocabulary IRI the engine emits.
namespace ns {
inline constexpr std::string_view pkg = "http://w3id.org/pkg/";
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view skos = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view pav = "http://purl.org/pav/";
inline constexpr std::string_view dcterms = "http://purl.org/dc/terms/";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";

struct Prefix {
    std::string_view prefix;
    std::string_view iri;
};

inline constexpr Prefix table[] = {
    {"pkg", pkg}, {"rdf", rdf}, {"skos", skos}, {"pav", pav}, {"dcterms", dcterms}, {"xsd", xsd},
};

/// `prefix:local` when the IRI falls in the table and the local part is a
/// plain name; otherwise nothing.
std::optional<std::string> compact(const Iri& iri);
} // namespace ns

namespace vocab {
Iri make(std::string_view ns, std::string_view local);

inline const Iri rdf_type = make(ns::rdf, "type");
inline const Iri rdf_Statement = make(ns::rdf, "Statement");
inline const Iri rdf_subject = make(ns::rdf, "subject");
inline const Iri rdf_predicate = make(ns::rdf, "predicate");
inline const Iri rdf_object = make(ns::rdf, "object");
inline const Iri rdf_langString = make(ns::rdf, "langString");

inline const Iri dcterms_description = make(ns::dcterms, "description");

inline const Iri skos_Concept = make(ns::skos, "Concept");
inline const Iri skos_prefLabel = make(ns::skos, "prefLabel");
inline const Iri skos_related = make(ns::skos, "related");
inline const Iri skos_broader = make(ns::skos, "broader");
inline const Iri skos_narrower = make(ns::skos, "narrower");
inline const Iri skos_inScheme = make(ns::skos, "inScheme");

inline const Iri pav_createdBy = make(ns::pav, "createdBy");
inline const Iri pav_createdOn = make(ns::pav, "createdOn");
inline const Iri pav_derivedFrom = make(ns::pav, "derivedFrom");

inline const Iri pkg_owner = make(ns::pkg, "owner");
inline const Iri pkg_readAccessRights = make(ns::pkg, "readAccessRights");
inline const Iri pkg_writeAccessRights = make(ns::pkg, "writeAccessRights");
inline const Iri pkg_Preference = make(ns::pkg, "Preference");
inline const Iri pkg_preference = make(ns::pkg, "preference");
inline const Iri pkg_topic = make(ns::pkg, "topic");
inline const Iri pkg_weight = make(ns::pkg, "weight");
inline const Iri pkg_alias = make(ns::pkg, "alias");
inline const Iri pkg_like = make(ns::pkg, "like");

inline const Iri xsd_string = make(ns::xsd, "string");
inline const Iri xsd_boolean = make(ns::xsd, "boolean");
inline const Iri xsd_integer = make(ns::xsd, "integer");
inline const Iri xsd_decimal = make(ns::xsd, "decimal");
inline const Iri xsd_double = make(ns::xsd, "double");
inline const Iri xsd_dateTime = make(ns::xsd, "dateTime");
} // namespace vocab

/// ASCII-only lower-casing; other bytes pass through unchanged.
std::string ascii_lower(std::string_view text);

} // namespace pkg

template <>
struct std::hash<pkg::Iri> {
    std::size_t operator()(const pkg::Iri& iri) const noexcept { return std::hash<std::string>{}(iri.str()); }
};

template <>
struct std::hash<pkg::Term> {
    std::size_t operator()(const pkg::Term& term) const noexcept;
};
