#include "lexer.hpp"

#include "pkg/rdf.hpp"

namespace pkg::detail {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool name_start(char c) { return is_alpha(c) || c == '_' || is_high(c); }
bool name_char(char c) { return name_start(c) || is_digit(c) || c == '-'; }

int hex_value(char c) {
    if (is_digit(c)) {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    return c - 'A' + 10;
}

} // namespace

bool Token::is_word(std::string_view keyword) const {
    return kind == TokenKind::Word && ascii_lower(text) == ascii_lower(keyword);
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

const Token& Lexer::peek() {
    if (!lookahead_) {
        lookahead_ = scan();
    }
    return *lookahead_;
}

Token Lexer::next() {
    if (lookahead_) {
        Token t = std::move(*lookahead_);
        lookahead_.reset();
        return t;
    }
    return scan();
}

void Lexer::fail(const std::string& message, const Token& at) const { throw ParseError(message, at.line, at.column); }

void Lexer::fail_here(const std::string& message) const { throw ParseError(message, line_, column_); }

void Lexer::advance(std::size_t n) {
    for (std::size_t i = 0; i < n && !at_end(); ++i) {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }
}

void Lexer::skip_space_and_comments() {
    while (!at_end()) {
        char c = cur();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
        } else if (c == '#') {
            while (!at_end() && cur() != '\n') {
                advance();
            }
        } else {
            break;
        }
    }
}

Token Lexer::make(TokenKind kind, std::size_t line, std::size_t col, std::string text, std::string extra) const {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.extra = std::move(extra);
    t.line = line;
    t.column = col;
    return t;
}

std::string Lexer::read_escape(bool iri_context) {
    // cur() == '\\'
    advance();
    if (at_end()) {
        fail_here("unterminated escape sequence");
    }
    char c = cur();
    if (c == 'u' || c == 'U') {
        std::size_t digits = c == 'u' ? 4 : 8;
        advance();
        char32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            if (!is_hex(cur()) || at_end()) {
                fail_here("malformed \\u escape");
            }
            cp = cp * 16 + static_cast<char32_t>(hex_value(cur()));
            advance();
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            fail_here("escape denotes an invalid code point");
        }
        std::string out;
        append_utf8(out, cp);
        return out;
    }
    if (iri_context) {
        fail_here("only \\u and \\U escapes are allowed in IRIs");
    }
    advance();
    switch (c) {
    case 't':
        return "\t";
    case 'n':
        return "\n";
    case 'r':
        return "\r";
    case 'b':
        return "\b";
    case 'f':
        return "\f";
    case '"':
        return "\"";
    case '\'':
        return "'";
    case '\\':
        return "\\";
    default:
        fail_here(std::string("unknown escape \\") + c);
    }
}

std::string Lexer::read_iri() {
    // cur() == '<'
    advance();
    std::string out;
    while (true) {
        if (at_end()) {
            fail_here("unterminated IRI");
        }
        char c = cur();
        if (c == '>') {
            advance();
            break;
        }
        if (c == '\\') {
            out += read_escape(true);
            continue;
        }
        auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
            fail_here("character not allowed in IRI");
        }
        out += c;
        advance();
    }
    if (!is_valid_iri(out)) {
        fail_here("relative or malformed IRI <" + out + ">");
    }
    return out;
}

std::string Lexer::read_string() {
    char quote = cur();
    bool long_form = ahead(1) == quote && ahead(2) == quote;
    advance(long_form ? 3 : 1);
    std::string out;
    while (true) {
        if (at_end()) {
            fail_here("unterminated string literal");
        }
        char c = cur();
        if (long_form) {
            if (c == quote && ahead(1) == quote && ahead(2) == quote) {
                advance(3);
                // A long string may end with up to two extra quote characters.
                while (cur() == quote && !at_end()) {
                    out += quote;
                    advance();
                }
                break;
            }
        } else {
            if (c == quote) {
                advance();
                break;
            }
            if (c == '\n' || c == '\r') {
                fail_here("line break inside a short string literal");
            }
        }
        if (c == '\\') {
            out += read_escape(false);
            continue;
        }
        out += c;
        advance();
    }
    return out;
}

std::string Lexer::read_local_name() {
    std::string out;
    while (!at_end()) {
        char c = cur();
        if (name_char(c) || c == ':') {
            out += c;
            advance();
        } else if (c == '.' && (name_char(ahead(1)) || ahead(1) == ':')) {
            out += c;
            advance();
        } else if (c == '%' && is_hex(ahead(1)) && is_hex(ahead(2))) {
            out += text_.substr(pos_, 3);
            advance(3);
        } else {
            break;
        }
    }
    return out;
}

Token Lexer::scan() {
    skip_space_and_comments();
    std::size_t line = line_;
    std::size_t col = column_;
    if (at_end()) {
        return make(TokenKind::End, line, col);
    }
    char c = cur();
    if (c == '<') {
        return make(TokenKind::IriRef, line, col, read_iri());
    }
    if (c == '"' || c == '\'') {
        return make(TokenKind::String, line, col, read_string());
    }
    if (c == '^' && ahead(1) == '^') {
        advance(2);
        return make(TokenKind::DoubleCaret, line, col);
    }
    if (c == '@') {
        advance();
        std::string tag;
        while (!at_end() && (is_alpha(cur()) || is_digit(cur()) || cur() == '-')) {
            tag += cur();
            advance();
        }
        if (tag == "prefix" || tag == "base") {
            return make(TokenKind::AtKeyword, line, col, tag);
        }
        bool ok = !tag.empty() && is_alpha(tag[0]) && tag.back() != '-' && tag.find("--") == std::string::npos;
        for (std::size_t i = 0; ok && i < tag.size() && tag[i] != '-'; ++i) {
            ok = is_alpha(tag[i]);
        }
        if (!ok) {
            fail("malformed language tag", make(TokenKind::LangTag, line, col));
        }
        return make(TokenKind::LangTag, line, col, tag);
    }
    if (c == '?' || c == '$') {
        advance();
        std::string name;
        while (!at_end() && (is_alpha(cur()) || is_digit(cur()) || cur() == '_')) {
            name += cur();
            advance();
        }
        if (name.empty()) {
            fail("empty variable name", make(TokenKind::Variable, line, col));
        }
        return make(TokenKind::Variable, line, col, name);
    }
    if (is_digit(c) || ((c == '+' || c == '-') && is_digit(ahead(1)))) {
        std::string lex;
        std::string type = "integer";
        if (c == '+' || c == '-') {
            lex += c;
            advance();
        }
        while (is_digit(cur()) && !at_end()) {
            lex += cur();
            advance();
        }
        if (cur() == '.' && is_digit(ahead(1))) {
            type = "decimal";
            lex += '.';
            advance();
            while (is_digit(cur()) && !at_end()) {
                lex += cur();
                advance();
            }
        }
        if ((cur() == 'e' || cur() == 'E') &&
            (is_digit(ahead(1)) || ((ahead(1) == '+' || ahead(1) == '-') && is_digit(ahead(2))))) {
            type = "double";
            lex += cur();
            advance();
            if (cur() == '+' || cur() == '-') {
                lex += cur();
                advance();
            }
            while (is_digit(cur()) && !at_end()) {
                lex += cur();
                advance();
            }
        }
        return make(TokenKind::Number, line, col, lex, type);
    }
    if (name_start(c) || c == ':') {
        std::string prefix;
        if (c != ':') {
            while (!at_end() && (name_char(cur()) || (cur() == '.' && name_char(ahead(1))))) {
                prefix += cur();
                advance();
            }
        }
        if (cur() == ':' && !at_end()) {
            advance();
            std::string local = read_local_name();
            return make(TokenKind::PrefixedName, line, col, prefix, local);
        }
        return make(TokenKind::Word, line, col, prefix);
    }
    switch (c) {
    case '{':
    case '}':
    case '(':
    case ')':
    case '[':
    case ']':
    case '.':
    case ';':
    case ',':
    case '=':
    case '*':
        advance();
        return make(TokenKind::Punct, line, col, std::string(1, c));
    default:
        break;
    }
    fail("unexpected character", make(TokenKind::End, line, col));
}

} // namespace pkg::detail
