#include "pkg/turtle.hpp"

#include <algorithm>
#include <map>

#include "lexer.hpp"
#include "term_reader.hpp"

namespace pkg {

using detail::Lexer;
using detail::TermReader;
using detail::TokenKind;

std::vector<Quad> parse_turtle(std::string_view text, const Iri& graph) {
    Lexer lex(text);
    TermReader reader(lex);
    std::vector<Quad> out;
    while (lex.peek().kind != TokenKind::End) {
        const auto& head = lex.peek();
        if (head.kind == TokenKind::AtKeyword) {
            auto keyword = lex.next();
            if (keyword.text == "base") {
                lex.fail("@base is not supported; use absolute IRIs", keyword);
            }
            auto pname = lex.next();
            auto iri = lex.next();
            reader.declare(pname, iri);
            reader.expect('.', "after @prefix declaration");
            continue;
        }
        if (head.is_word("PREFIX")) {
            lex.next();
            auto pname = lex.next();
            auto iri = lex.next();
            reader.declare(pname, iri);
            continue;
        }
        if (head.is_word("BASE")) {
            lex.fail("BASE is not supported; use absolute IRIs", head);
        }

        auto subject_token = lex.peek();
        if (subject_token.is_punct('[') || subject_token.is_punct('(')) {
            lex.fail("blank nodes and collections are not supported", subject_token);
        }
        Term subject = Term::iri(reader.read_iri());
        while (true) {
            Iri predicate = reader.read_verb();
            do {
                out.push_back({graph, subject, predicate, reader.read_term()});
            } while (reader.accept(','));
            if (!reader.accept(';')) {
                break;
            }
            while (reader.accept(';')) {
            }
            if (lex.peek().is_punct('.')) {
                break;
            }
        }
        reader.expect('.', "to end the triples");
    }
    return out;
}

namespace {

std::string render_iri(const Iri& iri) {
    if (auto c = ns::compact(iri)) {
        return *c;
    }
    return "<" + iri.str() + ">";
}

std::string render_term(const Term& t) {
    if (t.is_node()) {
        return render_iri(t.node_iri());
    }
    const auto& lit = t.as_literal();
    std::string out = "\"" + escape_string_literal(lit.lexical) + "\"";
    if (lit.language) {
        out += "@" + *lit.language;
    } else if (lit.datatype != vocab::xsd_string) {
        out += "^^" + render_iri(lit.datatype);
    }
    return out;
}

} // namespace

std::string write_turtle(std::span<const Quad> quads) {
    std::string out;
    for (const auto& entry : ns::table) {
        out += "@prefix " + std::string(entry.prefix) + ": <" + std::string(entry.iri) + "> .\n";
    }
    // subject -> predicate -> objects, all keyed by N-Triples text
    std::map<std::string, std::pair<Term, std::map<std::string, std::pair<Iri, std::map<std::string, Term>>>>> tree;
    for (const auto& q : quads) {
        auto& [subject, preds] = tree[to_ntriples(q.subject)];
        subject = q.subject;
        auto& [predicate, objects] = preds["<" + q.predicate.str() + ">"];
        predicate = q.predicate;
        objects.emplace(to_ntriples(q.object), q.object);
    }
    for (const auto& [skey, entry] : tree) {
        const auto& [subject, preds] = entry;
        out += "\n" + render_term(subject);
        bool first_pred = true;
        for (const auto& [pkey, pentry] : preds) {
            const auto& [predicate, objects] = pentry;
            out += first_pred ? " " : " ;\n    ";
            first_pred = false;
            out += predicate == vocab::rdf_type ? "a" : render_iri(predicate);
            bool first_obj = true;
            for (const auto& [okey, object] : objects) {
                out += first_obj ? " " : ", ";
                first_obj = false;
                out += render_term(object);
            }
        }
        out += " .\n";
    }
    return out;
}

std::string export_turtle(const QuadStore& store, const Iri& graph) {
    if (!store.has_graph(graph)) {
        throw StoreError("graph <" + graph.str() + "> belongs to no registered owner");
    }
    auto quads = store.quads(graph);
    return write_turtle(quads);
}

std::uint64_t import_turtle(QuadStore& store, const Iri& graph, std::string_view text) {
    auto quads = parse_turtle(text, graph);
    return store.insert(quads);
}

} // namespace pkg
