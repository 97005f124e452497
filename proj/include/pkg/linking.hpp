#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pkg/clock.hpp"
#include "pkg/http_client.hpp"
#include "pkg/ids.hpp"
#include "pkg/nl2pkg.hpp"
#include "pkg/rdf.hpp"
#include "pkg/store.hpp"
#include "pkg/vocabulary.hpp"

namespace pkg {

/// Owner-specific names ("my mom", "Bob") mapped to IRIs. First-person words
/// always resolve to the owner and cannot be rebound.
class PersonalAliasTable {
public:
    explicit PersonalAliasTable(Iri owner);

    const Iri& owner() const noexcept { return owner_; }

    /// Throws ValidationError for an empty or first-person alias or a bad IRI.
    void add(std::string_view alias, const Iri& iri);
    bool remove(std::string_view alias);
    std::optional<Iri> lookup(std::string_view surface) const;
    /// Normalized alias -> IRI, first-person words excluded.
    const std::map<std::string, Iri>& entries() const noexcept { return entries_; }

    /// Lower-cased, trimmed, inner whitespace collapsed to one space.
    static std::string normalize(std::string_view surface);
    static bool first_person(std::string_view normalized);

    /// `<iri> pkg:alias "alias"` in the owner graph.
    std::vector<Quad> to_quads() const;
    static PersonalAliasTable from_store(const QuadStore& store, const Iri& owner);

private:
    Iri owner_;
    std::map<std::string, Iri> entries_;
};

struct LinkCandidate {
    enum class Source { Local, External };

    std::string surface;
    Iri iri;
    double confidence = 0.0;
    Source source = Source::External;

    bool operator==(const LinkCandidate&) const = default;
};

std::optional<LinkCandidate> link_local(std::string_view surface, const PersonalAliasTable& table);

/// Best-effort: implementations report trouble through `warnings` and never throw.
class EntityLinker {
public:
    virtual ~EntityLinker() = default;
    virtual std::vector<LinkCandidate> link(std::string_view surface, std::vector<std::string>& warnings) = 0;
};

/// Shapes of linker responses that can be normalized.
enum class LinkerFormat {
    /// `{"annotations": [{"surface", "iri", "confidence"}]}`
    Native,
    /// REL: `[[start, length, mention, entity, ed_score, ...], ...]`
    Rel,
    /// DBpedia Spotlight: `{"Resources": [{"@URI", "@surfaceForm", "@similarityScore"}]}`
    Spotlight,
};

std::optional<LinkerFormat> parse_linker_format(std::string_view name);

/// Normalized, filtered (confidence in [0, 1], valid IRI) and sorted by
/// descending confidence. Throws ParseError when the body does not have the
/// expected shape at all.
std::vector<LinkCandidate> parse_linker_response(std::string_view body, LinkerFormat format);

struct LinkerEndpoint {
    std::string url;
    std::chrono::milliseconds timeout{5000};
    LinkerFormat format = LinkerFormat::Native;
};

/// POSTs `{"text": surface}` to the endpoint.
class HttpEntityLinker final : public EntityLinker {
public:
    HttpEntityLinker(LinkerEndpoint endpoint, std::shared_ptr<HttpTransport> transport);
    std::vector<LinkCandidate> link(std::string_view surface, std::vector<std::string>& warnings) override;

private:
    LinkerEndpoint endpoint_;
    std::shared_ptr<HttpTransport> transport_;
};

/// Predicates link only through this table (e.g. "like" -> pkg:like).
std::optional<Iri> relation_iri(std::string_view predicate_text);

/// Surface text that is already an IRI: `<...>`, or http(s)/urn schemes.
std::optional<Iri> literal_iri(std::string_view surface);

struct LinkingContext {
    const PersonalAliasTable& aliases;
    /// May be null: no external linking.
    EntityLinker* external = nullptr;
    double threshold = 0.5;
};

/// Local alias, else best external candidate at or above the threshold.
std::optional<LinkCandidate> link_entity(std::string_view surface, const LinkingContext& ctx,
                                         std::vector<std::string>& warnings);

struct Resolution {
    PkgStatement statement;
    std::vector<std::string> warnings;
};

/// Turns an ADD annotation into a complete statement: linked elements become
/// IRIs, the rest concepts with minted ids. Throws UnsupportedAction for other
/// intents and ValidationError when SPO texts are missing.
Resolution resolve(const AnnotatedUtterance& a, const LinkingContext& ctx, IdMinter& ids, const Iri& agent,
                   Timestamp now);

/// An IRI, or surface text matched case-insensitively against concept labels.
using PatternElement = std::variant<Iri, std::string>;

struct StatementPattern {
    std::optional<PatternElement> subject;
    std::optional<PatternElement> predicate;
    std::optional<PatternElement> object;

    bool operator==(const StatementPattern&) const = default;
};

/// GET/DELETE: absent texts are wildcards. Local aliases, literal IRIs and the
/// relation table resolve; everything else stays text.
StatementPattern resolve_pattern(const AnnotatedUtterance& a, const PersonalAliasTable& aliases);

} // namespace pkg
