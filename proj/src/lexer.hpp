#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "pkg/error.hpp"

namespace pkg::detail {

enum class TokenKind {
    IriRef,       // <...>, text = decoded IRI
    PrefixedName, // prefix:local, text = prefix, extra = local
    String,       // text = decoded value
    LangTag,      // @en-GB, text = tag
    AtKeyword,    // @prefix / @base, text = keyword
    DoubleCaret,  // ^^
    Variable,     // ?x or $x, text = name
    Number,       // text = lexical, extra = "integer" | "decimal" | "double"
    Word,         // bare identifier (keywords, `a`, true/false)
    Punct,        // text = single character
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::string extra;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is_punct(char c) const { return kind == TokenKind::Punct && text.size() == 1 && text[0] == c; }
    /// Case-insensitive keyword test.
    bool is_word(std::string_view keyword) const;
};

/// Tokenizer shared by the Turtle and SPARQL-subset parsers. Errors carry the
/// 1-based line and column of the offending character.
class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    const Token& peek();
    Token next();
    [[noreturn]] void fail(const std::string& message, const Token& at) const;
    [[noreturn]] void fail_here(const std::string& message) const;

private:
    Token scan();
    void skip_space_and_comments();
    bool at_end() const { return pos_ >= text_.size(); }
    char cur() const { return at_end() ? '\0' : text_[pos_]; }
    char ahead(std::size_t n) const { return pos_ + n < text_.size() ? text_[pos_ + n] : '\0'; }
    void advance(std::size_t n = 1);
    std::string read_iri();
    std::string read_string();
    std::string read_escape(bool iri_context);
    std::string read_local_name();
    Token make(TokenKind kind, std::size_t line, std::size_t col, std::string text = {}, std::string extra = {}) const;

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    std::optional<Token> lookahead_;
};

void append_utf8(std::string& out, char32_t cp);

} // namespace pkg::detail
