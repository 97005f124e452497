#include "pkg/sparql.hpp"

#include <set>

#include "lexer.hpp"
#include "term_reader.hpp"

namespace pkg {

using detail::Lexer;
using detail::TermReader;
using detail::Token;
using detail::TokenKind;

namespace {

class SparqlParser {
public:
    explicit SparqlParser(std::string_view text) : lex_(text), reader_(lex_) {}

    ParsedQuery parse(const std::optional<Iri>& default_graph) {
        while (lex_.peek().is_word("PREFIX")) {
            lex_.next();
            auto pname = lex_.next();
            auto iri = lex_.next();
            reader_.declare(pname, iri);
        }
        Token head = lex_.next();
        ParsedQuery result;
        if (head.is_word("SELECT")) {
            result = parse_select(default_graph);
        } else if (head.is_word("INSERT")) {
            expect_word("DATA");
            result = UpdateQuery{parse_insert_data()};
        } else if (head.is_word("DELETE")) {
            expect_word("WHERE");
            result = UpdateQuery{parse_delete_where()};
        } else {
            lex_.fail("expected SELECT, INSERT DATA or DELETE WHERE", head);
        }
        if (lex_.peek().kind != TokenKind::End) {
            lex_.fail("unexpected trailing input", lex_.peek());
        }
        return result;
    }

private:
    void expect_word(std::string_view word) {
        Token t = lex_.next();
        if (!t.is_word(word)) {
            lex_.fail("expected " + std::string(word), t);
        }
    }

    PatternTerm read_pattern_term() {
        if (lex_.peek().kind == TokenKind::Variable) {
            return Variable{lex_.next().text};
        }
        return reader_.read_term();
    }

    PatternTerm read_pattern_subject() {
        if (lex_.peek().kind == TokenKind::Variable) {
            return Variable{lex_.next().text};
        }
        return Term::iri(reader_.read_iri());
    }

    PatternTerm read_pattern_verb() {
        if (lex_.peek().kind == TokenKind::Variable) {
            return Variable{lex_.next().text};
        }
        return Term::iri(reader_.read_verb());
    }

    // triplesSameSubject with ; and , lists
    void read_triples(std::vector<TriplePattern>& out) {
        PatternTerm subject = read_pattern_subject();
        while (true) {
            PatternTerm verb = read_pattern_verb();
            do {
                out.push_back({subject, verb, read_pattern_term()});
            } while (reader_.accept(','));
            if (!reader_.accept(';')) {
                return;
            }
            while (reader_.accept(';')) {
            }
            const auto& next = lex_.peek();
            if (next.is_punct('.') || next.is_punct('}')) {
                return;
            }
        }
    }

    Filter read_filter() {
        reader_.expect('(', "after FILTER");
        Filter f;
        if (lex_.peek().is_word("LCASE")) {
            lex_.next();
            reader_.expect('(', "after LCASE");
            expect_word("STR");
            reader_.expect('(', "after STR");
            Token var = lex_.next();
            if (var.kind != TokenKind::Variable) {
                lex_.fail("expected a variable inside STR()", var);
            }
            reader_.expect(')', "to close STR(");
            reader_.expect(')', "to close LCASE(");
            reader_.expect('=', "in FILTER");
            Token lit = lex_.next();
            if (lit.kind != TokenKind::String) {
                lex_.fail("LCASE(STR(?v)) must be compared with a string literal", lit);
            }
            f.variable = var.text;
            f.value = reader_.finish_literal(lit.text);
            f.case_insensitive = true;
        } else if (lex_.peek().kind == TokenKind::Variable) {
            f.variable = lex_.next().text;
            reader_.expect('=', "in FILTER");
            f.value = reader_.read_term();
        } else {
            f.value = reader_.read_term();
            reader_.expect('=', "in FILTER");
            Token var = lex_.next();
            if (var.kind != TokenKind::Variable) {
                lex_.fail("FILTER must compare a variable with a term", var);
            }
            f.variable = var.text;
        }
        reader_.expect(')', "to close FILTER(");
        return f;
    }

    // Patterns and filters up to (not including) the closing brace.
    void read_group(std::vector<TriplePattern>& where, std::vector<Filter>* filters) {
        while (!lex_.peek().is_punct('}')) {
            const Token& t = lex_.peek();
            if (t.kind == TokenKind::End) {
                lex_.fail("unterminated group, expected '}'", t);
            }
            if (t.is_word("FILTER")) {
                if (!filters) {
                    lex_.fail("FILTER is not allowed here", t);
                }
                lex_.next();
                filters->push_back(read_filter());
            } else {
                read_triples(where);
            }
            while (reader_.accept('.')) {
            }
        }
    }

    SelectQuery parse_select(const std::optional<Iri>& default_graph) {
        SelectQuery q;
        if (lex_.peek().is_word("DISTINCT")) {
            lex_.next();
        }
        if (reader_.accept('*')) {
            // empty projection selects every variable
        } else {
            while (lex_.peek().kind == TokenKind::Variable) {
                q.projection.push_back(lex_.next().text);
            }
            if (q.projection.empty()) {
                lex_.fail("expected '*' or projected variables", lex_.peek());
            }
        }
        std::optional<Iri> graph;
        if (lex_.peek().is_word("FROM")) {
            lex_.next();
            graph = reader_.read_iri();
        }
        if (lex_.peek().is_word("WHERE")) {
            lex_.next();
        }
        reader_.expect('{', "to open the WHERE clause");
        if (lex_.peek().is_word("GRAPH")) {
            Token at = lex_.next();
            Iri named = reader_.read_iri();
            if (graph && *graph != named) {
                lex_.fail("FROM and GRAPH name different graphs", at);
            }
            graph = named;
            reader_.expect('{', "after GRAPH <iri>");
            read_group(q.where, &q.filters);
            reader_.expect('}', "to close GRAPH");
            while (reader_.accept('.')) {
            }
            while (lex_.peek().is_word("FILTER")) {
                lex_.next();
                q.filters.push_back(read_filter());
                while (reader_.accept('.')) {
                }
            }
        } else {
            read_group(q.where, &q.filters);
        }
        reader_.expect('}', "to close the WHERE clause");
        if (!graph) {
            if (!default_graph) {
                lex_.fail("no graph given: use FROM <g> or GRAPH <g> { ... }", lex_.peek());
            }
            graph = default_graph;
        }
        q.graph = *graph;
        return q;
    }

    InsertData parse_insert_data() {
        InsertData data;
        reader_.expect('{', "after INSERT DATA");
        while (!reader_.accept('}')) {
            Token t = lex_.next();
            if (!t.is_word("GRAPH")) {
                lex_.fail("INSERT DATA requires GRAPH <g> { ... } blocks", t);
            }
            Iri graph = reader_.read_iri();
            reader_.expect('{', "after GRAPH <iri>");
            std::vector<TriplePattern> where;
            Token start = lex_.peek();
            read_group(where, nullptr);
            reader_.expect('}', "to close GRAPH");
            while (reader_.accept('.')) {
            }
            for (auto& tp : where) {
                if (std::holds_alternative<Variable>(tp.subject) || std::holds_alternative<Variable>(tp.predicate) ||
                    std::holds_alternative<Variable>(tp.object)) {
                    lex_.fail("INSERT DATA must be ground; variables are not allowed", start);
                }
                data.quads.push_back({graph, std::get<Term>(tp.subject), std::get<Term>(tp.predicate).node_iri(),
                                      std::get<Term>(tp.object)});
            }
        }
        return data;
    }

    DeleteWhere parse_delete_where() {
        DeleteWhere del;
        reader_.expect('{', "after DELETE WHERE");
        Token t = lex_.next();
        if (!t.is_word("GRAPH")) {
            lex_.fail("DELETE WHERE requires a GRAPH <g> { ... } block", t);
        }
        del.graph = reader_.read_iri();
        reader_.expect('{', "after GRAPH <iri>");
        read_group(del.where, nullptr);
        reader_.expect('}', "to close GRAPH");
        while (reader_.accept('.')) {
        }
        reader_.expect('}', "to close DELETE WHERE");
        return del;
    }

    Lexer lex_;
    TermReader reader_;
};

class Writer {
public:
    std::string iri(const Iri& value) {
        if (auto c = ns::compact(value)) {
            used_.insert(c->substr(0, c->find(':')));
            return *c;
        }
        return "<" + value.str() + ">";
    }

    std::string term(const Term& t) {
        if (t.is_node()) {
            return iri(t.node_iri());
        }
        const auto& lit = t.as_literal();
        std::string out = "\"" + escape_string_literal(lit.lexical) + "\"";
        if (lit.language) {
            out += "@" + *lit.language;
        } else if (lit.datatype != vocab::xsd_string) {
            out += "^^" + iri(lit.datatype);
        }
        return out;
    }

    std::string pattern_term(const PatternTerm& pt) {
        if (const auto* v = std::get_if<Variable>(&pt)) {
            return "?" + v->name;
        }
        return term(std::get<Term>(pt));
    }

    std::string pattern(const TriplePattern& tp) {
        return pattern_term(tp.subject) + " " + pattern_term(tp.predicate) + " " + pattern_term(tp.object) + " .";
    }

    std::string prologue() const {
        std::string out;
        for (const auto& entry : ns::table) {
            if (used_.contains(std::string(entry.prefix))) {
                out += "PREFIX " + std::string(entry.prefix) + ": <" + std::string(entry.iri) + ">\n";
            }
        }
        return out;
    }

private:
    std::set<std::string> used_;
};

} // namespace

ParsedQuery parse_sparql(std::string_view text, const std::optional<Iri>& default_graph) {
    SparqlParser parser(text);
    return parser.parse(default_graph);
}

std::string to_sparql(const SelectQuery& query) {
    Writer w;
    std::string body = "SELECT";
    if (query.projection.empty()) {
        body += " *";
    }
    for (const auto& v : query.projection) {
        body += " ?" + v;
    }
    body += " WHERE {\n  GRAPH " + w.iri(query.graph) + " {\n";
    for (const auto& tp : query.where) {
        body += "    " + w.pattern(tp) + "\n";
    }
    for (const auto& f : query.filters) {
        if (f.case_insensitive) {
            body += "    FILTER(LCASE(STR(?" + f.variable + ")) = " + w.term(f.value) + ")\n";
        } else {
            body += "    FILTER(?" + f.variable + " = " + w.term(f.value) + ")\n";
        }
    }
    body += "  }\n}\n";
    return w.prologue() + body;
}

std::string to_sparql(const UpdateQuery& query) {
    Writer w;
    std::string body;
    if (const auto* ins = std::get_if<InsertData>(&query.op)) {
        body = "INSERT DATA {\n";
        std::size_t i = 0;
        while (i < ins->quads.size()) {
            const Iri& graph = ins->quads[i].graph;
            body += "  GRAPH " + w.iri(graph) + " {\n";
            for (; i < ins->quads.size() && ins->quads[i].graph == graph; ++i) {
                const auto& q = ins->quads[i];
                body += "    " + w.term(q.subject) + " " + w.iri(q.predicate) + " " + w.term(q.object) + " .\n";
            }
            body += "  }\n";
        }
        body += "}\n";
    } else {
        const auto& del = std::get<DeleteWhere>(query.op);
        body = "DELETE WHERE {\n  GRAPH " + w.iri(del.graph) + " {\n";
        for (const auto& tp : del.where) {
            body += "    " + w.pattern(tp) + "\n";
        }
        body += "  }\n}\n";
    }
    return w.prologue() + body;
}

} // namespace pkg
