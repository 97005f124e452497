#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "pkg/error.hpp"
#include "pkg/store.hpp"
#include "pkg/turtle.hpp"
#include "pkg/vocabulary.hpp"

namespace pkg {
namespace {

const Iri kG{"http://pkg.example/alice"};

std::set<Quad> as_set(const std::vector<Quad>& quads) { return {quads.begin(), quads.end()}; }

ParseError parse_error(std::string_view text) {
    try {
        parse_turtle(text, kG);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "accepted: " << text;
    return ParseError("none", 0, 0);
}

TEST(TurtleParse, PrefixesListsAndLiterals) {
    auto quads = parse_turtle(R"(@prefix ex: <http://x.org/> .
PREFIX skos: <http://www.w3.org/2004/02/skos/core#>
ex:a a skos:Concept ;
     skos:prefLabel "Tom \"TC\" Cruise"@en , "tc" ;
     ex:n 42 , -4.5 , true ;
     ex:w "+1.0"^^<http://www.w3.org/2001/XMLSchema#decimal> ;
     ex:long """two
lines""" .
<http://x.org/b> ex:p ex:a .
)",
                              kG);
    std::set<Quad> expected{
        {kG, Term::iri(Iri{"http://x.org/a"}), vocab::rdf_type, Term::iri(vocab::skos_Concept)},
        {kG, Term::iri(Iri{"http://x.org/a"}), vocab::skos_prefLabel, Term::lang_literal("Tom \"TC\" Cruise", "en")},
        {kG, Term::iri(Iri{"http://x.org/a"}), vocab::skos_prefLabel, Term::literal("tc")},
        {kG, Term::iri(Iri{"http://x.org/a"}), Iri{"http://x.org/n"}, Term::literal("42", vocab::xsd_integer)},
        {kG, Term::iri(Iri{"http://x.org/a"}), Iri{"http://x.org/n"}, Term::literal("-4.5", vocab::xsd_decimal)},
        {kG, Term::iri(Iri{"http://x.org/a"}), Iri{"http://x.org/n"}, Term::literal("true", vocab::xsd_boolean)},
        {kG, Term::iri(Iri{"http://x.org/a"}), Iri{"http://x.org/w"}, Term::literal("+1.0", vocab::xsd_decimal)},
        {kG, Term::iri(Iri{"http://x.org/a"}), Iri{"http://x.org/long"}, Term::literal("two\nlines")},
        {kG, Term::iri(Iri{"http://x.org/b"}), Iri{"http://x.org/p"}, Term::iri(Iri{"http://x.org/a"})},
    };
    EXPECT_EQ(as_set(quads), expected);
}

TEST(TurtleParse, TrailingSemicolonAndComments) {
    auto quads = parse_turtle("# header\n<http://x.org/a> <http://x.org/p> \"v\" ; . # done\n", kG);
    ASSERT_EQ(quads.size(), 1u);
}

TEST(TurtleParse, UnsupportedFeaturesReportPosition) {
    auto e = parse_error("@base <http://x.org/> .");
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(e.detail().find("@base"), std::string::npos);

    e = parse_error("@prefix ex: <http://x.org/> .\n\n  [ ex:p ex:o ] .");
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 3u);

    e = parse_error("<http://x.org/a> <http://x.org/p> ( <http://x.org/b> ) .");
    EXPECT_EQ(e.line(), 1u);
    EXPECT_THROW(parse_turtle("_:b <http://x.org/p> <http://x.org/o> .", kG), ParseError);
    EXPECT_THROW(parse_turtle("BASE <http://x.org/>", kG), ParseError);
}

TEST(TurtleParse, SyntaxErrors) {
    EXPECT_THROW(parse_turtle("<http://x.org/a> <http://x.org/p> \"open", kG), ParseError);
    EXPECT_THROW(parse_turtle("<http://x.org/a> <http://x.org/p> <http://x.org/o>", kG), ParseError);
    EXPECT_THROW(parse_turtle("un:known <http://x.org/p> <http://x.org/o> .", kG), ParseError);
    EXPECT_THROW(parse_turtle("\"lit\" <http://x.org/p> <http://x.org/o> .", kG), ParseError);
    EXPECT_THROW(parse_turtle("<http://x.org/a> \"p\" <http://x.org/o> .", kG), ParseError);
    EXPECT_THROW(parse_turtle("<not an iri> <http://x.org/p> <http://x.org/o> .", kG), ParseError);
    auto e = parse_error("<http://x.org/a>\n<http://x.org/p>\n<http://x.org/o> ;; ,");
    EXPECT_EQ(e.line(), 3u);
}

TEST(TurtleWrite, DeterministicAndCompact) {
    std::vector<Quad> quads{
        {kG, Term::iri(Iri{"http://x.org/b"}), vocab::skos_prefLabel, Term::literal("b")},
        {kG, Term::iri(Iri{"http://x.org/a"}), vocab::rdf_type, Term::iri(vocab::skos_Concept)},
        {kG, Term::iri(Iri{"http://x.org/a"}), vocab::skos_prefLabel, Term::literal("a\n\"q\"")},
    };
    auto text = write_turtle(quads);
    std::vector<Quad> reversed(quads.rbegin(), quads.rend());
    EXPECT_EQ(write_turtle(reversed), text);
    EXPECT_NE(text.find("@prefix skos: <http://www.w3.org/2004/02/skos/core#> ."), std::string::npos);
    EXPECT_NE(text.find("skos:Concept"), std::string::npos);
    EXPECT_LT(text.find("<http://x.org/a>"), text.find("<http://x.org/b>"));
    EXPECT_EQ(as_set(parse_turtle(text, kG)), as_set(quads));
}

TEST(TurtleRoundTrip, RandomStatementsSurviveExportImport) {
    testing::Rng rng(31);
    std::vector<Iri> services{Iri{"http://svc.example/a"}, Iri{"http://svc.example/b"}};
    for (int i = 0; i < 200; ++i) {
        QuadStore a;
        a.register_graph(kG);
        std::vector<PkgStatement> statements;
        for (std::size_t k = 0, n = 1 + testing::pick(rng, 3); k < n; ++k) {
            statements.push_back(testing::random_statement(rng, kG, services));
            a.insert(statement_to_quads(statements.back(), kG));
        }
        auto text = export_turtle(a, kG);
        QuadStore b;
        b.register_graph(kG);
        import_turtle(b, kG, text);
        ASSERT_EQ(as_set(a.quads(kG)), as_set(b.quads(kG))) << i;
        auto all = b.quads(kG);
        for (const auto& st : statements) {
            EXPECT_EQ(quads_to_statement(all, st.id), st);
        }
        EXPECT_EQ(export_turtle(b, kG), text);
    }
}

TEST(TurtleImport, SyntaxErrorLeavesStoreUntouched) {
    QuadStore store;
    store.register_graph(kG);
    auto rev = store.revision();
    EXPECT_THROW(import_turtle(store, kG, "<http://x.org/a> <http://x.org/p> <http://x.org/o> .\n<http://x.org/a> ("),
                 ParseError);
    EXPECT_EQ(store.revision(), rev);
    EXPECT_EQ(store.size(kG), 0u);
    EXPECT_THROW(export_turtle(store, Iri{"http://pkg.example/eve"}), StoreError);
    EXPECT_THROW(import_turtle(store, Iri{"http://pkg.example/eve"}, "<http://x.org/a> <http://x.org/p> 1 ."),
                 StoreError);
}

} // namespace
} // namespace pkg
