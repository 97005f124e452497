#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "pkg/error.hpp"
#include "pkg/http_client.hpp"
#include "pkg/rdf.hpp"

namespace pkg {

enum class Intent { Add, Get, Delete, Unknown };

std::string_view to_string(Intent intent);
/// Case-insensitive "ADD" / "GET" / "DELETE" / "UNKNOWN".
std::optional<Intent> parse_intent(std::string_view text);

/// Stage-1 output: what the utterance asks for, with SPO and preference still
/// in surface form.
struct AnnotatedUtterance {
    std::string raw;
    Intent intent = Intent::Unknown;
    std::optional<std::string> subject_text;
    std::optional<std::string> predicate_text;
    std::optional<std::string> object_text;
    /// +1 or -1; only meaningful for ADD.
    std::optional<int> preference_polarity;
    std::string annotator_id;
    /// Why a backend degraded to UNKNOWN ("transport", "intent-parse", ...).
    std::optional<std::string> failure_reason;
    std::vector<std::string> warnings;

    bool operator==(const AnnotatedUtterance&) const = default;
};

/// Enforces: UNKNOWN carries no SPO or polarity; polarity is +1/-1 and only on
/// ADD; ADD has all three SPO texts.
std::vector<Violation> validate_annotation(const AnnotatedUtterance& a);

struct AnnotationContext {
    Iri owner;
};

/// Total: implementations never throw and fall back to UNKNOWN.
class Annotator {
public:
    virtual ~Annotator() = default;
    virtual AnnotatedUtterance annotate(std::string_view raw, const AnnotationContext& ctx) = 0;
};

/// Closed relation lexicon, `lemma<TAB>polarity` per line with polarity in
/// {+1, -1, 0}. Lemmas may span several words ("live in"); only the first
/// word is inflected.
class RelationLexicon {
public:
    struct Entry {
        std::vector<std::string> words;
        int polarity = 0;
    };

    /// Throws ParseError on malformed lines. Blank lines and `#` comments are skipped.
    static RelationLexicon parse(std::string_view text);
    static RelationLexicon load(const std::filesystem::path& file);
    static const RelationLexicon& builtin();

    const std::vector<Entry>& entries() const { return entries_; }
    std::optional<int> polarity(std::string_view lemma) const;

    /// Lemma of `word` (lower-cased) when it is an inflection of the first word
    /// of some entry: suffix stripping plus a few irregular forms.
    std::optional<std::string> lemmatize(std::string_view word) const;

private:
    std::vector<Entry> entries_;
};

/// Deterministic offline annotator: keyword intent rules, split on the first
/// relation verb, polarity from the lexicon with single pre-verb negation.
class RuleAnnotator final : public Annotator {
public:
    RuleAnnotator();
    explicit RuleAnnotator(RelationLexicon lexicon);

    AnnotatedUtterance annotate(std::string_view raw, const AnnotationContext& ctx) override;
    AnnotatedUtterance annotate(std::string_view raw) const;

private:
    RelationLexicon lexicon_;
};

/// Runs the rule annotator with the built-in lexicon.
AnnotatedUtterance rule_annotate(std::string_view raw);

/// One template per task, each with an `{{utterance}}` placeholder.
struct PromptTemplates {
    std::string intent;
    std::string spo;
    std::string preference;

    static PromptTemplates builtin();
    /// Reads intent.txt, spo.txt and preference.txt from `dir`.
    static PromptTemplates load(const std::filesystem::path& dir);
};

std::string render_prompt(std::string_view tmpl, std::string_view utterance);

/// Chat-completion backend. Throws TransportError on failure.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct ModelEndpoint {
    std::string url;
    std::string model;
    std::chrono::milliseconds timeout{30000};
    std::size_t max_in_flight = 4;
};

/// POSTs `{model, prompt}` and reads `{response}`.
class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(ModelEndpoint endpoint, std::shared_ptr<HttpTransport> transport);
    std::string complete(const std::string& prompt) override;

private:
    ModelEndpoint endpoint_;
    std::shared_ptr<HttpTransport> transport_;
};

// Structured answer grammar: the last non-empty line of a response.
struct SpoAnswer {
    std::optional<std::string> subject;
    std::optional<std::string> predicate;
    std::optional<std::string> object;

    bool operator==(const SpoAnswer&) const = default;
};

std::optional<std::string> final_line(std::string_view response);
/// `INTENT: <ADD|GET|DELETE|UNKNOWN>`
std::optional<Intent> parse_intent_answer(std::string_view response);
/// `SPO: <s> | <p> | <o>`; an element that is empty, `-` or `none` is absent.
std::optional<SpoAnswer> parse_spo_answer(std::string_view response);
/// `PREF: <+1|-1|none>`; the inner optional is empty for `none`.
std::optional<std::optional<int>> parse_preference_answer(std::string_view response);

/// Three sequential prompt exchanges (intent, SPO, preference). Any transport
/// or parse failure yields UNKNOWN with `failure_reason` set.
AnnotatedUtterance model_annotate(std::string_view raw, ChatBackend& backend, const PromptTemplates& prompts);

class ModelAnnotator final : public Annotator {
public:
    ModelAnnotator(std::shared_ptr<ChatBackend> backend, PromptTemplates prompts, std::size_t max_in_flight = 4);

    AnnotatedUtterance annotate(std::string_view raw, const AnnotationContext& ctx) override;

private:
    class BoundedBackend;

    std::shared_ptr<ChatBackend> backend_;
    PromptTemplates prompts_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

} // namespace pkg
