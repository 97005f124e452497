#include "pkg/linking.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace pkg {

namespace {

using nlohmann::json;

constexpr std::string_view kFirstPerson[] = {"i", "me", "my", "myself"};

std::optional<double> number_or_numeric_string(const json& v) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        try {
            std::size_t used = 0;
            double d = std::stod(s, &used);
            if (used == s.size()) {
                return d;
            }
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

std::string wikipedia_iri(std::string title) {
    std::replace(title.begin(), title.end(), ' ', '_');
    return "https://en.wikipedia.org/wiki/" + title;
}

} // namespace

PersonalAliasTable::PersonalAliasTable(Iri owner) : owner_(std::move(owner)) {}

std::string PersonalAliasTable::normalize(std::string_view surface) {
    std::string out;
    bool pending_space = false;
    for (char c : surface) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return ascii_lower(out);
}

bool PersonalAliasTable::first_person(std::string_view normalized) {
    return std::find(std::begin(kFirstPerson), std::end(kFirstPerson), normalized) != std::end(kFirstPerson);
}

void PersonalAliasTable::add(std::string_view alias, const Iri& iri) {
    auto key = normalize(alias);
    std::vector<Violation> violations;
    if (key.empty()) {
        violations.push_back({"alias", "alias must not be empty"});
    } else if (first_person(key)) {
        violations.push_back({"alias", "first-person aliases always denote the owner"});
    }
    if (!iri.valid()) {
        violations.push_back({"iri", "not a valid absolute IRI: '" + iri.str() + "'"});
    }
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    entries_[key] = iri;
}

bool PersonalAliasTable::remove(std::string_view alias) { return entries_.erase(normalize(alias)) > 0; }

std::optional<Iri> PersonalAliasTable::lookup(std::string_view surface) const {
    auto key = normalize(surface);
    if (first_person(key)) {
        return owner_;
    }
    if (auto it = entries_.find(key); it != entries_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::vector<Quad> PersonalAliasTable::to_quads() const {
    std::vector<Quad> out;
    for (const auto& [alias, iri] : entries_) {
        out.push_back({owner_, Term::iri(iri), vocab::pkg_alias, Term::literal(alias)});
    }
    return out;
}

PersonalAliasTable PersonalAliasTable::from_store(const QuadStore& store, const Iri& owner) {
    PersonalAliasTable table(owner);
    TriplePattern pattern{Variable{"iri"}, Term::iri(vocab::pkg_alias), Variable{"alias"}};
    for (const auto& row : store.match(owner, pattern)) {
        const auto& iri = row.at("iri");
        const auto& alias = row.at("alias");
        if (!alias.is_literal() || !iri.is_node()) {
            continue;
        }
        auto key = normalize(alias.str());
        if (!key.empty() && !first_person(key) && iri.node_iri().valid()) {
            table.entries_[key] = iri.node_iri();
        }
    }
    return table;
}

std::optional<LinkCandidate> link_local(std::string_view surface, const PersonalAliasTable& table) {
    if (auto iri = table.lookup(surface)) {
        return LinkCandidate{std::string(surface), *iri, 1.0, LinkCandidate::Source::Local};
    }
    return std::nullopt;
}

std::optional<LinkerFormat> parse_linker_format(std::string_view name) {
    auto n = ascii_lower(name);
    if (n == "native" || n.empty()) {
        return LinkerFormat::Native;
    }
    if (n == "rel") {
        return LinkerFormat::Rel;
    }
    if (n == "spotlight") {
        return LinkerFormat::Spotlight;
    }
    return std::nullopt;
}

std::vector<LinkCandidate> parse_linker_response(std::string_view body, LinkerFormat format) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
        throw ParseError("linker response is not JSON", 1, 1);
    }
    std::vector<LinkCandidate> raw;
    auto push = [&](const json* surface, const json* iri, const json* confidence, bool wiki_title) {
        if (!iri || !iri->is_string() || !confidence) {
            return;
        }
        auto c = number_or_numeric_string(*confidence);
        if (!c) {
            return;
        }
        std::string text = surface && surface->is_string() ? surface->get<std::string>() : std::string{};
        std::string target = iri->get<std::string>();
        raw.push_back({std::move(text), Iri{wiki_title ? wikipedia_iri(std::move(target)) : std::move(target)}, *c,
                       LinkCandidate::Source::External});
    };
    auto field = [](const json& obj, const char* key) -> const json* {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    };

    switch (format) {
    case LinkerFormat::Native: {
        if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
            throw ParseError("expected an object with an 'annotations' array", 1, 1);
        }
        for (const auto& a : doc["annotations"]) {
            if (a.is_object()) {
                push(field(a, "surface"), field(a, "iri"), field(a, "confidence"), false);
            }
        }
        break;
    }
    case LinkerFormat::Rel: {
        if (!doc.is_array()) {
            throw ParseError("expected an array of REL spans", 1, 1);
        }
        for (const auto& span : doc) {
            if (span.is_array() && span.size() >= 5) {
                push(&span[2], &span[3], &span[4], true);
            }
        }
        break;
    }
    case LinkerFormat::Spotlight: {
        if (!doc.is_object()) {
            throw ParseError("expected a Spotlight object", 1, 1);
        }
        // Spotlight omits "Resources" when nothing was found.
        if (auto it = doc.find("Resources"); it != doc.end()) {
            if (!it->is_array()) {
                throw ParseError("'Resources' must be an array", 1, 1);
            }
            for (const auto& r : *it) {
                if (r.is_object()) {
                    push(field(r, "@surfaceForm"), field(r, "@URI"), field(r, "@similarityScore"), false);
                }
            }
        }
        break;
    }
    }

    std::vector<LinkCandidate> out;
    for (auto& c : raw) {
        if (std::isfinite(c.confidence) && c.confidence >= 0.0 && c.confidence <= 1.0 && c.iri.valid()) {
            out.push_back(std::move(c));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LinkCandidate& a, const LinkCandidate& b) { return a.confidence > b.confidence; });
    return out;
}

HttpEntityLinker::HttpEntityLinker(LinkerEndpoint endpoint, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}

std::vector<LinkCandidate> HttpEntityLinker::link(std::string_view surface, std::vector<std::string>& warnings) {
    try {
        json request = {{"text", std::string(surface)}};
        auto body = transport_->post_json(endpoint_.url, request.dump(), endpoint_.timeout);
        auto candidates = parse_linker_response(body, endpoint_.format);
        for (auto& c : candidates) {
            if (c.surface.empty()) {
                c.surface = std::string(surface);
            }
        }
        return candidates;
    } catch (const std::exception& e) {
        warnings.push_back("entity linker: " + std::string(e.what()));
        return {};
    }
}

std::optional<Iri> relation_iri(std::string_view predicate_text) {
    auto key = PersonalAliasTable::normalize(predicate_text);
    if (key == "like") {
        return vocab::pkg_like;
    }
    return std::nullopt;
}

std::optional<Iri> literal_iri(std::string_view surface) {
    auto s = surface;
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    while (!s.empty() && s.back() == ' ') {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>') {
        Iri iri{std::string(s.substr(1, s.size() - 2))};
        return iri.valid() ? std::optional<Iri>(iri) : std::nullopt;
    }
    if (s.starts_with("http://") || s.starts_with("https://") || s.starts_with("urn:")) {
        Iri iri{std::string(s)};
        return iri.valid() ? std::optional<Iri>(iri) : std::nullopt;
    }
    return std::nullopt;
}

std::optional<LinkCandidate> link_entity(std::string_view surface, const LinkingContext& ctx,
                                         std::vector<std::string>& warnings) {
    if (auto iri = literal_iri(surface)) {
        return LinkCandidate{std::string(surface), *iri, 1.0, LinkCandidate::Source::Local};
    }
    if (auto local = link_local(surface, ctx.aliases)) {
        return local;
    }
    if (!ctx.external) {
        return std::nullopt;
    }
    for (auto& c : ctx.external->link(surface, warnings)) {
        // Candidates arrive sorted, but a misbehaving linker is not trusted.
        if (c.confidence >= ctx.threshold && c.confidence <= 1.0 && c.iri.valid()) {
            c.source = LinkCandidate::Source::External;
            return c;
        }
    }
    return std::nullopt;
}

Resolution resolve(const AnnotatedUtterance& a, const LinkingContext& ctx, IdMinter& ids, const Iri& agent,
                   Timestamp now) {
    if (a.intent != Intent::Add) {
        throw UnsupportedAction("only ADD annotations resolve to statements");
    }
    if (auto violations = validate_annotation(a); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    const Iri& owner = ctx.aliases.owner();
    Resolution r;
    auto concept_for = [&](const std::string& text) -> SpoElement {
        return Concept{ids.mint(owner, NodeKind::Concept), text, {}, {}, {}};
    };
    auto entity = [&](const std::string& text) -> SpoElement {
        if (auto hit = link_entity(text, ctx, r.warnings)) {
            return hit->iri;
        }
        return concept_for(text);
    };

    PkgStatement& st = r.statement;
    st.id = ids.mint(owner, NodeKind::Statement);
    st.annotation = a.raw;
    st.subject = entity(*a.subject_text);
    if (auto rel = relation_iri(*a.predicate_text)) {
        st.predicate = *rel;
    } else if (auto iri = literal_iri(*a.predicate_text)) {
        st.predicate = *iri;
    } else {
        st.predicate = concept_for(*a.predicate_text);
    }
    st.object = entity(*a.object_text);
    st.provenance.created_by = agent;
    st.provenance.created_on = now;
    if (a.preference_polarity) {
        st.preference =
            Preference{ids.mint(owner, NodeKind::Preference), element_iri(st.subject), st.object,
                       static_cast<double>(*a.preference_polarity), st.id};
    }
    return r;
}

StatementPattern resolve_pattern(const AnnotatedUtterance& a, const PersonalAliasTable& aliases) {
    auto entity = [&](const std::optional<std::string>& text) -> std::optional<PatternElement> {
        if (!text) {
            return std::nullopt;
        }
        if (auto iri = literal_iri(*text)) {
            return *iri;
        }
        if (auto iri = aliases.lookup(*text)) {
            return *iri;
        }
        return *text;
    };
    StatementPattern p;
    p.subject = entity(a.subject_text);
    p.object = entity(a.object_text);
    if (a.predicate_text) {
        if (auto rel = relation_iri(*a.predicate_text)) {
            p.predicate = *rel;
        } else if (auto iri = literal_iri(*a.predicate_text)) {
            p.predicate = *iri;
        } else {
            p.predicate = *a.predicate_text;
        }
    }
    return p;
}

} // namespace pkg
