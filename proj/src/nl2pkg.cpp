#include "pkg/nl2pkg.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "embedded_data.hpp"

namespace pkg {

namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(kSpace);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(kSpace);
    return s.substr(b, e - b + 1);
}

bool contains(std::initializer_list<std::string_view> set, std::string_view word) {
    return std::find(set.begin(), set.end(), word) != set.end();
}

template <std::size_t N>
bool contains(const std::string_view (&set)[N], std::string_view word) {
    return std::find(std::begin(set), std::end(set), word) != std::end(set);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + file.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (kSpace.find(c) != std::string_view::npos) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

// A word of the utterance: surface form for output, folded form for matching.
struct Token {
    std::string surface;
    std::string key;
};

std::vector<Token> tokenize(std::string_view text) {
    constexpr std::string_view kEdgePunct = ".,!?;:\"()[]{}";
    std::vector<Token> out;
    for (auto& word : split_words(text)) {
        // Typographic apostrophe U+2019 folds to ASCII.
        std::string folded;
        for (std::size_t i = 0; i < word.size(); ++i) {
            if (i + 2 < word.size() && static_cast<unsigned char>(word[i]) == 0xE2 &&
                static_cast<unsigned char>(word[i + 1]) == 0x80 && static_cast<unsigned char>(word[i + 2]) == 0x99) {
                folded += '\'';
                i += 2;
            } else {
                folded += word[i];
            }
        }
        std::string_view w = folded;
        while (!w.empty() && kEdgePunct.find(w.front()) != std::string_view::npos) {
            w.remove_prefix(1);
        }
        while (!w.empty() && kEdgePunct.find(w.back()) != std::string_view::npos) {
            w.remove_suffix(1);
        }
        if (!w.empty()) {
            out.push_back({std::string(w), ascii_lower(w)});
        }
    }
    return out;
}

std::string join(const std::vector<Token>& tokens, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to && i < tokens.size(); ++i) {
        if (!out.empty()) {
            out += ' ';
        }
        out += tokens[i].surface;
    }
    return out;
}

const std::map<std::string, std::string, std::less<>>& irregular_forms() {
    static const std::map<std::string, std::string, std::less<>> forms = {
        {"is", "be"},   {"are", "be"},   {"am", "be"},   {"was", "be"},     {"were", "be"},
        {"has", "have"}, {"had", "have"}, {"does", "do"}, {"did", "do"},     {"ate", "eat"},
        {"drank", "drink"}, {"drove", "drive"}, {"spoke", "speak"}, {"knew", "know"}, {"knows", "know"},
    };
    return forms;
}

constexpr std::string_view kDeleteTriggers[] = {"delete", "remove", "forget", "erase"};
constexpr std::string_view kWhTriggers[] = {"what", "who", "whom", "which", "where", "when",
                                                                 "how"};
constexpr std::string_view kImperativeGet[] = {"show", "list", "tell", "give", "find",
                                                                    "get",  "retrieve", "display"};
constexpr std::string_view kAuxiliaries[] = {"do", "does", "did", "is", "are", "am", "was",
                                                                  "were", "can", "could", "have", "has"};
constexpr std::string_view kNegations[] = {"not", "never", "don't", "doesn't", "didn't",
                                                                "dont", "doesnt", "didnt"};
constexpr std::string_view kArticles[] = {"a", "an", "the"};
// Words that end the wh-/imperative preamble of a question.
constexpr std::string_view kQuestionFillers[] = {
    "do", "does", "did", "what", "who", "which", "that", "me", "everything", "things", "all", "whatever"};

struct VerbHit {
    std::size_t index = 0;
    std::size_t length = 0;
    const RelationLexicon::Entry* entry = nullptr;
};

std::string lemma_text(const RelationLexicon::Entry& e) {
    std::string out;
    for (const auto& w : e.words) {
        if (!out.empty()) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

std::optional<VerbHit> find_relation(const RelationLexicon& lexicon, const std::vector<Token>& tokens,
                                     std::size_t from) {
    for (std::size_t i = from; i < tokens.size(); ++i) {
        auto lemma = lexicon.lemmatize(tokens[i].key);
        if (!lemma) {
            continue;
        }
        const RelationLexicon::Entry* best = nullptr;
        for (const auto& e : lexicon.entries()) {
            if (e.words.front() != *lemma || i + e.words.size() > tokens.size()) {
                continue;
            }
            bool ok = true;
            for (std::size_t k = 1; k < e.words.size() && ok; ++k) {
                ok = tokens[i + k].key == e.words[k];
            }
            if (ok && (!best || e.words.size() > best->words.size())) {
                best = &e;
            }
        }
        if (best) {
            return VerbHit{i, best->words.size(), best};
        }
    }
    return std::nullopt;
}

// Object text: remainder after the verb with one leading article dropped.
std::optional<std::string> object_after(const std::vector<Token>& tokens, std::size_t from) {
    if (from < tokens.size() && contains(kArticles, tokens[from].key)) {
        ++from;
    }
    auto text = join(tokens, from, tokens.size());
    if (text.empty()) {
        return std::nullopt;
    }
    return text;
}

struct Extraction {
    std::optional<std::string> subject;
    std::string predicate;
    std::optional<std::string> object;
    std::optional<int> polarity;
};

// Splits tokens[from..] around the first relation verb. `subject_from` may be
// moved forward by the caller's preamble rules.
std::optional<Extraction> extract(const RelationLexicon& lexicon, const std::vector<Token>& tokens,
                                  std::size_t from, bool question) {
    auto hit = find_relation(lexicon, tokens, from);
    if (!hit) {
        return std::nullopt;
    }
    std::size_t subject_end = hit->index;
    bool negated = false;
    if (subject_end > from && contains(kNegations, tokens[subject_end - 1].key)) {
        negated = true;
        --subject_end;
        if ((tokens[subject_end].key == "not" || tokens[subject_end].key == "never") && subject_end > from &&
            contains({"do", "does", "did"}, tokens[subject_end - 1].key)) {
            --subject_end;
        }
    }
    std::size_t subject_begin = from;
    if (question) {
        for (std::size_t k = from; k < subject_end; ++k) {
            if (contains(kQuestionFillers, tokens[k].key)) {
                subject_begin = k + 1;
            }
        }
    }
    Extraction x;
    auto subject = join(tokens, subject_begin, subject_end);
    if (!subject.empty()) {
        x.subject = std::move(subject);
    }
    auto lemma = lemma_text(*hit->entry);
    x.predicate = negated ? "not " + lemma : lemma;
    x.object = object_after(tokens, hit->index + hit->length);
    int polarity = hit->entry->polarity;
    if (negated) {
        polarity = polarity > 0 ? -1 : 0;
    }
    if (polarity != 0) {
        x.polarity = polarity;
    }
    return x;
}

AnnotatedUtterance unknown(std::string_view raw, std::string annotator) {
    AnnotatedUtterance a;
    a.raw = std::string(raw);
    a.annotator_id = std::move(annotator);
    return a;
}

} // namespace

std::string_view to_string(Intent intent) {
    switch (intent) {
    case Intent::Add:
        return "ADD";
    case Intent::Get:
        return "GET";
    case Intent::Delete:
        return "DELETE";
    case Intent::Unknown:
        return "UNKNOWN";
    }
    return "UNKNOWN";
}

std::optional<Intent> parse_intent(std::string_view text) {
    auto t = ascii_lower(trim(text));
    if (t == "add") {
        return Intent::Add;
    }
    if (t == "get") {
        return Intent::Get;
    }
    if (t == "delete") {
        return Intent::Delete;
    }
    if (t == "unknown") {
        return Intent::Unknown;
    }
    return std::nullopt;
}

std::vector<Violation> validate_annotation(const AnnotatedUtterance& a) {
    std::vector<Violation> out;
    const std::array<std::pair<const char*, const std::optional<std::string>*>, 3> spo = {
        {{"subject_text", &a.subject_text}, {"predicate_text", &a.predicate_text}, {"object_text", &a.object_text}}};
    if (a.intent == Intent::Unknown) {
        for (const auto& [name, value] : spo) {
            if (value->has_value()) {
                out.push_back({name, "UNKNOWN carries no extracted elements"});
            }
        }
    }
    if (a.preference_polarity) {
        if (*a.preference_polarity != 1 && *a.preference_polarity != -1) {
            out.push_back({"preference_polarity", "polarity must be +1 or -1"});
        }
        if (a.intent != Intent::Add) {
            out.push_back({"preference_polarity", "a preference is only meaningful for ADD"});
        }
    }
    if (a.intent == Intent::Add) {
        for (const auto& [name, value] : spo) {
            if (!value->has_value() || trim(**value).empty()) {
                out.push_back({name, "ADD needs subject, predicate and object"});
            }
        }
    }
    return out;
}

RelationLexicon RelationLexicon::parse(std::string_view text) {
    RelationLexicon lex;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto tab = body.find('\t');
        if (tab == std::string_view::npos) {
            throw ParseError("expected lemma<TAB>polarity", line_no, 1);
        }
        auto lemma = trim(body.substr(0, tab));
        auto pol = trim(body.substr(tab + 1));
        Entry e;
        if (pol == "+1" || pol == "1") {
            e.polarity = 1;
        } else if (pol == "-1") {
            e.polarity = -1;
        } else if (pol == "0") {
            e.polarity = 0;
        } else {
            throw ParseError("polarity must be +1, -1 or 0", line_no, tab + 2);
        }
        e.words = split_words(ascii_lower(lemma));
        if (e.words.empty()) {
            throw ParseError("empty lemma", line_no, 1);
        }
        lex.entries_.push_back(std::move(e));
    }
    return lex;
}

RelationLexicon RelationLexicon::load(const std::filesystem::path& file) { return parse(read_file(file)); }

const RelationLexicon& RelationLexicon::builtin() {
    static const RelationLexicon lexicon = parse(data::relations_tsv);
    return lexicon;
}

std::optional<int> RelationLexicon::polarity(std::string_view lemma) const {
    auto words = split_words(ascii_lower(lemma));
    for (const auto& e : entries_) {
        if (e.words == words) {
            return e.polarity;
        }
    }
    return std::nullopt;
}

std::optional<std::string> RelationLexicon::lemmatize(std::string_view word) const {
    auto known = [&](std::string_view w) {
        return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.words.front() == w; });
    };
    std::string w = ascii_lower(word);
    if (known(w)) {
        return w;
    }
    if (auto it = irregular_forms().find(w); it != irregular_forms().end() && known(it->second)) {
        return it->second;
    }
    auto strip = [&](std::string_view suffix, std::string_view replacement) -> std::optional<std::string> {
        if (w.size() > suffix.size() + 1 && w.ends_with(suffix)) {
            std::string candidate = w.substr(0, w.size() - suffix.size()) + std::string(replacement);
            if (known(candidate)) {
                return candidate;
            }
        }
        return std::nullopt;
    };
    for (auto [suffix, repl] : std::initializer_list<std::pair<std::string_view, std::string_view>>{
             {"ies", "y"}, {"es", ""}, {"s", ""}, {"ied", "y"}, {"ed", ""}, {"d", ""}, {"ing", ""}, {"ing", "e"}}) {
        if (auto hit = strip(suffix, repl)) {
            return hit;
        }
    }
    return std::nullopt;
}

RuleAnnotator::RuleAnnotator() : lexicon_(RelationLexicon::builtin()) {}

RuleAnnotator::RuleAnnotator(RelationLexicon lexicon) : lexicon_(std::move(lexicon)) {}

AnnotatedUtterance RuleAnnotator::annotate(std::string_view raw, const AnnotationContext&) { return annotate(raw); }

AnnotatedUtterance RuleAnnotator::annotate(std::string_view raw) const {
    AnnotatedUtterance a = unknown(raw, "rule");
    auto text = trim(raw);
    auto tokens = tokenize(text);
    std::size_t i = 0;
    while (i < tokens.size() && tokens[i].key == "please") {
        ++i;
    }
    if (i >= tokens.size()) {
        return a;
    }
    bool question_mark = text.ends_with('?');
    const std::string& first = tokens[i].key;

    if (contains(kDeleteTriggers, first)) {
        std::size_t from = i + 1;
        if (from < tokens.size() && tokens[from].key == "that") {
            ++from;
        }
        if (from < tokens.size() && contains({"the", "my", "this"}, tokens[from].key) && from + 1 < tokens.size() &&
            contains({"statement", "fact", "note"}, tokens[from + 1].key)) {
            from += 2;
            if (from < tokens.size() && contains({"that", "about"}, tokens[from].key)) {
                ++from;
            }
        }
        if (from + 1 < tokens.size() && contains({"everything", "all", "anything"}, tokens[from].key) &&
            tokens[from + 1].key == "about") {
            from += 2;
        }
        if (auto x = extract(lexicon_, tokens, from, false)) {
            a.intent = Intent::Delete;
            a.subject_text = x->subject;
            a.predicate_text = x->predicate;
            a.object_text = x->object;
        } else if (auto object = object_after(tokens, from)) {
            a.intent = Intent::Delete;
            a.object_text = object;
        }
        return a;
    }

    bool wh = contains(kWhTriggers, first);
    bool imperative = contains(kImperativeGet, first);
    bool aux_question = question_mark && contains(kAuxiliaries, first);
    if (wh || imperative || aux_question) {
        a.intent = Intent::Get;
        std::size_t from = i + 1;
        if (auto x = extract(lexicon_, tokens, from, true)) {
            a.subject_text = x->subject;
            a.predicate_text = x->predicate;
            // For wh-questions the object is what is being asked for.
            a.object_text = x->object;
        } else {
            for (std::size_t k = from; k < tokens.size(); ++k) {
                if (tokens[k].key == "about") {
                    a.object_text = object_after(tokens, k + 1);
                    break;
                }
            }
        }
        return a;
    }

    auto x = extract(lexicon_, tokens, i, false);
    if (!x || !x->subject || !x->object) {
        return a;
    }
    a.intent = Intent::Add;
    a.subject_text = x->subject;
    a.predicate_text = x->predicate;
    a.object_text = x->object;
    a.preference_polarity = x->polarity;
    return a;
}

AnnotatedUtterance rule_annotate(std::string_view raw) {
    static const RuleAnnotator annotator;
    return annotator.annotate(raw);
}

PromptTemplates PromptTemplates::builtin() {
    return {std::string(data::prompt_intent), std::string(data::prompt_spo), std::string(data::prompt_preference)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    return {read_file(dir / "intent.txt"), read_file(dir / "spo.txt"), read_file(dir / "preference.txt")};
}

std::string render_prompt(std::string_view tmpl, std::string_view utterance) {
    constexpr std::string_view kSlot = "{{utterance}}";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto hit = tmpl.find(kSlot, pos);
        if (hit == std::string_view::npos) {
            out += tmpl.substr(pos);
            return out;
        }
        out += tmpl.substr(pos, hit - pos);
        out += utterance;
        pos = hit + kSlot.size();
    }
}

HttpChatBackend::HttpChatBackend(ModelEndpoint endpoint, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}

std::string HttpChatBackend::complete(const std::string& prompt) {
    nlohmann::json request = {{"model", endpoint_.model}, {"prompt", prompt}};
    auto body = transport_->post_json(endpoint_.url, request.dump(), endpoint_.timeout);
    auto reply = nlohmann::json::parse(body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("response") || !reply["response"].is_string()) {
        throw TransportError("chat endpoint reply lacks a string 'response' field");
    }
    return reply["response"].get<std::string>();
}

std::optional<std::string> final_line(std::string_view response) {
    std::optional<std::string> last;
    std::size_t start = 0;
    while (start <= response.size()) {
        auto end = response.find('\n', start);
        auto line = trim(response.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!line.empty()) {
            last = std::string(line);
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return last;
}

namespace {

std::optional<std::string> labelled_answer(std::string_view response, std::string_view label) {
    auto line = final_line(response);
    if (!line) {
        return std::nullopt;
    }
    std::string_view l = *line;
    if (l.size() < label.size() + 1 || ascii_lower(l.substr(0, label.size())) != ascii_lower(label) ||
        l[label.size()] != ':') {
        return std::nullopt;
    }
    return std::string(trim(l.substr(label.size() + 1)));
}

std::optional<std::string> element(std::string_view text) {
    auto t = trim(text);
    auto lowered = ascii_lower(t);
    if (t.empty() || t == "-" || lowered == "none" || lowered == "null") {
        return std::nullopt;
    }
    return std::string(t);
}

} // namespace

std::optional<Intent> parse_intent_answer(std::string_view response) {
    auto body = labelled_answer(response, "INTENT");
    if (!body) {
        return std::nullopt;
    }
    return parse_intent(*body);
}

std::optional<SpoAnswer> parse_spo_answer(std::string_view response) {
    auto body = labelled_answer(response, "SPO");
    if (!body) {
        return std::nullopt;
    }
    std::vector<std::string_view> parts;
    std::string_view rest = *body;
    while (true) {
        auto bar = rest.find('|');
        parts.push_back(rest.substr(0, bar));
        if (bar == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(bar + 1);
    }
    if (parts.size() != 3) {
        return std::nullopt;
    }
    return SpoAnswer{element(parts[0]), element(parts[1]), element(parts[2])};
}

std::optional<std::optional<int>> parse_preference_answer(std::string_view response) {
    auto body = labelled_answer(response, "PREF");
    if (!body) {
        return std::nullopt;
    }
    auto v = ascii_lower(*body);
    if (v == "+1" || v == "1") {
        return std::optional<int>{1};
    }
    if (v == "-1") {
        return std::optional<int>{-1};
    }
    if (v == "none" || v == "0") {
        return std::optional<int>{};
    }
    return std::nullopt;
}

AnnotatedUtterance model_annotate(std::string_view raw, ChatBackend& backend, const PromptTemplates& prompts) {
    AnnotatedUtterance a = unknown(raw, "model");
    auto degrade = [&](std::string reason) {
        AnnotatedUtterance out = unknown(raw, "model");
        out.failure_reason = std::move(reason);
        out.warnings = std::move(a.warnings);
        return out;
    };
    std::string utterance(trim(raw));
    if (utterance.empty()) {
        return a;
    }
    try {
        auto intent = parse_intent_answer(backend.complete(render_prompt(prompts.intent, utterance)));
        if (!intent) {
            return degrade("intent-parse");
        }
        if (*intent == Intent::Unknown) {
            return a;
        }
        auto spo = parse_spo_answer(backend.complete(render_prompt(prompts.spo, utterance)));
        if (!spo || (*intent == Intent::Add && (!spo->subject || !spo->predicate || !spo->object))) {
            return degrade("spo-parse");
        }
        auto pref = parse_preference_answer(backend.complete(render_prompt(prompts.preference, utterance)));
        if (!pref) {
            return degrade("pref-parse");
        }
        a.intent = *intent;
        a.subject_text = spo->subject;
        a.predicate_text = spo->predicate;
        a.object_text = spo->object;
        if (pref->has_value()) {
            if (*intent == Intent::Add) {
                a.preference_polarity = **pref;
            } else {
                a.warnings.push_back("preference dropped: only ADD statements carry preferences");
            }
        }
        return a;
    } catch (const std::exception& e) {
        a.warnings.push_back(e.what());
        return degrade("transport");
    }
}

class ModelAnnotator::BoundedBackend final : public ChatBackend {
public:
    BoundedBackend(ChatBackend& inner, std::counting_semaphore<>& slots) : inner_(inner), slots_(slots) {}

    std::string complete(const std::string& prompt) override {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};
        return inner_.complete(prompt);
    }

private:
    ChatBackend& inner_;
    std::counting_semaphore<>& slots_;
};

ModelAnnotator::ModelAnnotator(std::shared_ptr<ChatBackend> backend, PromptTemplates prompts,
                               std::size_t max_in_flight)
    : backend_(std::move(backend)),
      prompts_(std::move(prompts)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, max_in_flight)))) {}

AnnotatedUtterance ModelAnnotator::annotate(std::string_view raw, const AnnotationContext&) {
    BoundedBackend bounded(*backend_, *in_flight_);
    return model_annotate(raw, bounded, prompts_);
}

} // namespace pkg
