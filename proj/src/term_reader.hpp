#pragma once

#include <map>
#include <string>

#include "lexer.hpp"
#include "pkg/rdf.hpp"

namespace pkg::detail {

/// Prefix bookkeeping and RDF term productions common to Turtle and SPARQL.
class TermReader {
public:
    explicit TermReader(Lexer& lexer) : lex_(lexer) {}

    Lexer& lexer() { return lex_; }

    void declare(const Token& pname, const Token& iri) {
        if (pname.kind != TokenKind::PrefixedName || !pname.extra.empty()) {
            lex_.fail("expected a prefix name such as 'ex:'", pname);
        }
        if (iri.kind != TokenKind::IriRef) {
            lex_.fail("expected an IRI in angle brackets", iri);
        }
        prefixes_[pname.text] = iri.text;
    }

    bool at_iri() { return lex_.peek().kind == TokenKind::IriRef || lex_.peek().kind == TokenKind::PrefixedName; }

    Iri expand(const Token& t) {
        if (t.kind == TokenKind::IriRef) {
            return Iri{t.text};
        }
        if (t.kind != TokenKind::PrefixedName) {
            lex_.fail("expected an IRI", t);
        }
        if (t.text == "_") {
            lex_.fail("blank nodes are not supported; use IRIs", t);
        }
        auto it = prefixes_.find(t.text);
        if (it == prefixes_.end()) {
            lex_.fail("undeclared prefix '" + t.text + ":'", t);
        }
        std::string full = it->second + t.extra;
        if (!is_valid_iri(full)) {
            lex_.fail("prefixed name expands to an invalid IRI <" + full + ">", t);
        }
        return Iri{std::move(full)};
    }

    Iri read_iri() { return expand(lex_.next()); }

    /// Predicate position: an IRI or the keyword `a`.
    Iri read_verb() {
        const Token& t = lex_.peek();
        if (t.kind == TokenKind::Word && t.text == "a") {
            lex_.next();
            return vocab::rdf_type;
        }
        return read_iri();
    }

    /// IRI, literal, number or boolean.
    Term read_term() {
        Token t = lex_.next();
        switch (t.kind) {
        case TokenKind::IriRef:
        case TokenKind::PrefixedName:
            return Term::iri(expand(t));
        case TokenKind::String:
            return finish_literal(std::move(t.text));
        case TokenKind::Number:
            return Term::literal(t.text, t.extra == "integer"   ? vocab::xsd_integer
                                         : t.extra == "decimal" ? vocab::xsd_decimal
                                                                : vocab::xsd_double);
        case TokenKind::Word:
            if (t.text == "true" || t.text == "false") {
                return Term::literal(t.text, vocab::xsd_boolean);
            }
            break;
        case TokenKind::Punct:
            if (t.is_punct('[') || t.is_punct('(')) {
                lex_.fail("blank nodes and collections are not supported", t);
            }
            break;
        default:
            break;
        }
        lex_.fail("expected an RDF term", t);
    }

    Term finish_literal(std::string value) {
        const Token& after = lex_.peek();
        if (after.kind == TokenKind::LangTag) {
            return Term::lang_literal(std::move(value), lex_.next().text);
        }
        if (after.kind == TokenKind::DoubleCaret) {
            lex_.next();
            Token dt_token = lex_.next();
            Iri dt = expand(dt_token);
            if (dt == vocab::rdf_langString) {
                lex_.fail("rdf:langString requires a language tag", dt_token);
            }
            return Term::literal(std::move(value), std::move(dt));
        }
        return Term::literal(std::move(value));
    }

    void expect(char punct, const char* context) {
        Token t = lex_.next();
        if (!t.is_punct(punct)) {
            lex_.fail(std::string("expected '") + punct + "' " + context, t);
        }
    }

    bool accept(char punct) {
        if (lex_.peek().is_punct(punct)) {
            lex_.next();
            return true;
        }
        return false;
    }

private:
    Lexer& lex_;
    std::map<std::string, std::string> prefixes_;
};

} // namespace pkg::detail
