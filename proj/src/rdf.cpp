#include "pkg/rdf.hpp"

#include <cctype>
#include <cstdio>

#include "pkg/error.hpp"

namespace pkg {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_lower(char c) { return is_digit(c) || (c >= 'a' && c <= 'f'); }

bool is_uuid(std::string_view s) {
    if (s.size() != 36) {
        return false;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-') {
                return false;
            }
        } else if (!is_hex_lower(s[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

bool is_valid_iri(std::string_view text) noexcept {
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= text.size()) {
        return false;
    }
    if (!is_alpha(text[0])) {
        return false;
    }
    for (std::size_t i = 1; i < colon; ++i) {
        char c = text[i];
        if (!is_alpha(c) && !is_digit(c) && c != '+' && c != '-' && c != '.') {
            return false;
        }
    }
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u == 0x7f) {
            return false;
        }
        switch (c) {
        case '<':
        case '>':
        case '"':
        case '{':
        case '}':
        case '|':
        case '\\':
        case '^':
        case '`':
            return false;
        default:
            break;
        }
    }
    return true;
}

Iri Iri::checked(std::string value, std::string_view field) {
    if (!is_valid_iri(value)) {
        throw ValidationError({{std::string(field), "not a valid absolute IRI: '" + value + "'"}});
    }
    return Iri{std::move(value)};
}

std::ostream& operator<<(std::ostream& os, const Iri& iri) { return os << '<' << iri.str() << '>'; }

bool looks_like_skolem(std::string_view iri) noexcept {
    if (iri.size() < 38) {
        return false;
    }
    auto uuid = iri.substr(iri.size() - 36);
    if (!is_uuid(uuid)) {
        return false;
    }
    auto head = iri.substr(0, iri.size() - 36);
    for (std::string_view kind : {"/stmt/", "/concept/", "/pref/"}) {
        if (head.size() > kind.size() && head.ends_with(kind)) {
            return true;
        }
    }
    return false;
}

Term Term::iri(Iri iri) {
    if (looks_like_skolem(iri.str())) {
        return Term{Skolem{std::move(iri)}};
    }
    return Term{std::move(iri)};
}

Term Term::skolem(Iri iri) {
    if (!looks_like_skolem(iri.str())) {
        throw ValidationError({{"skolem", "not a minted skolem IRI: '" + iri.str() + "'"}});
    }
    return Term{Skolem{std::move(iri)}};
}

Term Term::literal(std::string lexical) { return Term{Literal{std::move(lexical), vocab::xsd_string, std::nullopt}}; }

Term Term::literal(std::string lexical, Iri datatype) {
    return Term{Literal{std::move(lexical), std::move(datatype), std::nullopt}};
}

Term Term::lang_literal(std::string lexical, std::string language) {
    return Term{Literal{std::move(lexical), vocab::rdf_langString, std::move(language)}};
}

const Iri& Term::node_iri() const {
    if (auto* s = std::get_if<Skolem>(&value_)) {
        return s->iri;
    }
    return std::get<pkg::Iri>(value_);
}

const std::string& Term::str() const {
    if (is_literal()) {
        return as_literal().lexical;
    }
    return node_iri().str();
}

std::string escape_string_literal(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 2);
    for (char c : text) {
        switch (c) {
        case '\\':
            out += "\\\\";
            break;
        case '"':
            out += "\\\"";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\r':
            out += "\\r";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(static_cast<unsigned char>(c)));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

std::string to_ntriples(const Term& term) {
    if (term.is_node()) {
        return "<" + term.node_iri().str() + ">";
    }
    const auto& lit = term.as_literal();
    std::string out = "\"" + escape_string_literal(lit.lexical) + "\"";
    if (lit.language) {
        out += "@" + *lit.language;
    } else if (lit.datatype != vocab::xsd_string) {
        out += "^^<" + lit.datatype.str() + ">";
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const Term& term) { return os << to_ntriples(term); }

std::ostream& operator<<(std::ostream& os, const Quad& q) {
    return os << q.subject << ' ' << q.predicate << ' ' << q.object << ' ' << q.graph << " .";
}

namespace ns {
std::optional<std::string> compact(const Iri& iri) {
    for (const auto& entry : table) {
        if (iri.str().size() <= entry.iri.size() || !iri.str().starts_with(entry.iri)) {
            continue;
        }
        auto local = std::string_view(iri.str()).substr(entry.iri.size());
        bool plain = is_alpha(local[0]) || local[0] == '_';
        for (char c : local) {
            plain = plain && (is_alpha(c) || is_digit(c) || c == '_' || c == '-');
        }
        if (plain) {
            return std::string(entry.prefix) + ":" + std::string(local);
        }
    }
    return std::nullopt;
}
} // namespace ns

namespace vocab {
Iri make(std::string_view ns, std::string_view local) { return Iri{std::string(ns) + std::string(local)}; }
} // namespace vocab

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
          std::string msg = "validation failed";
          for (const auto& v : violations) {
              msg += "; " + v.field + ": " + v.message;
          }
          return msg;
      }()),
      violations_(std::move(violations)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<Violation>{{std::move(field), std::move(message)}}) {}

StructuralError::StructuralError(std::vector<std::string> missing)
    : Error([&] {
          std::string msg = "incomplete statement, missing";
          for (const auto& m : missing) {
              msg += " " + m;
          }
          return msg;
      }()),
      missing_(std::move(missing)) {}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      detail_(message),
      line_(line),
      column_(column) {}

} // namespace pkg

std::size_t std::hash<pkg::Term>::operator()(const pkg::Term& term) const noexcept {
    std::size_t h = std::hash<std::string>{}(term.str());
    if (term.is_literal()) {
        const auto& lit = term.as_literal();
        h ^= std::hash<std::string>{}(lit.datatype.str()) * 31 + (lit.language ? std::hash<std::string>{}(*lit.language) : 7);
    }
    return h;
}
