#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "oracles.hpp"
#include "pkg/error.hpp"
#include "pkg/ids.hpp"
#include "pkg/vocabulary.hpp"

namespace pkg {
namespace {

const Iri kOwner{"http://pkg.example/alice"};

PkgStatement tom_cruise() {
    PkgStatement st;
    st.id = skolem_iri(kOwner, NodeKind::Statement, "00000000-0000-4000-8000-000000000001");
    st.annotation = "I dislike all movies with the actor Tom Cruise";
    st.subject = kOwner;
    st.predicate = Concept{skolem_iri(kOwner, NodeKind::Concept, "00000000-0000-4000-8000-000000000002"),
                           "dislike", {}, {}, {}};
    Concept movies{skolem_iri(kOwner, NodeKind::Concept, "00000000-0000-4000-8000-000000000003"),
                   "all movies with the actor Tom Cruise", {}, {}, {}};
    st.object = movies;
    st.provenance.created_by = kOwner;
    st.provenance.created_on = Timestamp{std::chrono::seconds{1718000000}};
    st.preference = Preference{skolem_iri(kOwner, NodeKind::Preference, "00000000-0000-4000-8000-000000000004"),
                               kOwner, movies, -1.0, st.id};
    return st;
}

bool contains(const std::vector<Quad>& quads, const Term& s, const Iri& p, const Term& o) {
    return std::find(quads.begin(), quads.end(), Quad{kOwner, s, p, o}) != quads.end();
}

TEST(Weight, Format) {
    EXPECT_EQ(format_weight(1.0), "+1.0");
    EXPECT_EQ(format_weight(-1.0), "-1.0");
    EXPECT_EQ(format_weight(0.0), "0.0");
    EXPECT_EQ(format_weight(0.25), "+0.25");
    EXPECT_EQ(format_weight(-0.125), "-0.125");
}

TEST(Weight, Parse) {
    EXPECT_EQ(parse_weight("+1.0"), 1.0);
    EXPECT_EQ(parse_weight("-1.0"), -1.0);
    EXPECT_EQ(parse_weight("1"), 1.0);
    EXPECT_EQ(parse_weight("0.37"), 0.37);
    EXPECT_EQ(parse_weight(""), std::nullopt);
    EXPECT_EQ(parse_weight("+"), std::nullopt);
    EXPECT_EQ(parse_weight("1e3"), std::nullopt);
    EXPECT_EQ(parse_weight("1.0.0"), std::nullopt);
    EXPECT_EQ(parse_weight("one"), std::nullopt);
}

TEST(Weight, RoundTripProperty) {
    testing::Rng rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        double w = dist(rng);
        EXPECT_EQ(parse_weight(format_weight(w)), w) << format_weight(w);
    }
}

TEST(StatementToQuads, TomCruiseShape) {
    auto st = tom_cruise();
    auto quads = statement_to_quads(st, kOwner);
    EXPECT_EQ(quads.size(), testing::expected_quad_count(st));
    EXPECT_EQ(quads.size(), 19u);
    Term id = Term::iri(st.id);
    const auto& movies = std::get<Concept>(st.object);
    EXPECT_TRUE(contains(quads, id, vocab::rdf_type, Term::iri(vocab::rdf_Statement)));
    EXPECT_TRUE(contains(quads, id, vocab::dcterms_description, Term::literal(st.annotation)));
    EXPECT_TRUE(contains(quads, id, vocab::rdf_subject, Term::iri(kOwner)));
    EXPECT_TRUE(contains(quads, id, vocab::rdf_object, Term::iri(movies.id)));
    EXPECT_TRUE(contains(quads, id, vocab::pav_createdOn,
                         Term::literal("2024-06-10T06:13:20Z", vocab::xsd_dateTime)));
    EXPECT_TRUE(contains(quads, Term::iri(movies.id), vocab::rdf_type, Term::iri(vocab::skos_Concept)));
    EXPECT_TRUE(contains(quads, Term::iri(movies.id), vocab::skos_prefLabel, Term::literal(movies.text)));
    Term pref = Term::iri(st.preference->id);
    EXPECT_TRUE(contains(quads, Term::iri(kOwner), vocab::pkg_preference, pref));
    EXPECT_TRUE(contains(quads, pref, vocab::rdf_type, Term::iri(vocab::pkg_Preference)));
    EXPECT_TRUE(contains(quads, pref, vocab::pkg_topic, Term::iri(movies.id)));
    EXPECT_TRUE(contains(quads, pref, vocab::pkg_weight, Term::literal("-1.0", vocab::xsd_decimal)));
    EXPECT_TRUE(contains(quads, pref, vocab::pav_derivedFrom, id));
}

TEST(StatementToQuads, MinimalStatementHasEightQuads) {
    PkgStatement st;
    st.id = skolem_iri(kOwner, NodeKind::Statement, "00000000-0000-4000-8000-000000000009");
    st.annotation = "Bob likes Oppenheimer";
    st.subject = Iri{"http://example.org/bob"};
    st.predicate = vocab::pkg_like;
    st.object = Iri{"http://dbpedia.org/resource/Oppenheimer_(film)"};
    st.provenance.created_by = kOwner;
    st.provenance.created_on = Timestamp{std::chrono::seconds{0}};
    auto quads = statement_to_quads(st, kOwner);
    EXPECT_EQ(quads.size(), 8u);
    EXPECT_TRUE(contains(quads, Term::iri(st.id), vocab::pkg_owner, Term::iri(kOwner)));
    EXPECT_EQ(statement_to_quads(st, kOwner), quads);
}

TEST(StatementToQuads, AccessAndLinksAddOneQuadEach) {
    auto st = tom_cruise();
    auto base = statement_to_quads(st, kOwner).size();
    st.access.read = {Iri{"http://svc.example/a"}, Iri{"http://svc.example/b"}};
    st.access.write = {Iri{"http://svc.example/a"}};
    st.provenance.derived_from = Iri{"http://pkg.example/alice/stmt/0"};
    std::get<Concept>(st.predicate).related.insert(Iri{"http://example.org/aversion"});
    EXPECT_EQ(statement_to_quads(st, kOwner).size(), base + 5);
}

TEST(StatementToQuads, CountMatchesFieldOracle) {
    testing::Rng rng(17);
    std::vector<Iri> services = {Iri{"http://svc.example/1"}, Iri{"http://svc.example/2"}};
    for (int i = 0; i < 500; ++i) {
        auto st = testing::random_statement(rng, kOwner, services);
        auto quads = statement_to_quads(st, kOwner);
        ASSERT_EQ(quads.size(), testing::expected_quad_count(st)) << i;
        std::set<Quad> distinct(quads.begin(), quads.end());
        EXPECT_EQ(distinct.size(), quads.size());
        for (const auto& q : quads) {
            EXPECT_EQ(q.graph, kOwner);
        }
    }
}

TEST(StatementToQuads, RejectsInvalidStatements) {
    auto st = tom_cruise();
    st.annotation = "  ";
    st.access.read.insert(kOwner);
    st.preference->weight = 2.0;
    try {
        statement_to_quads(st, kOwner);
        FAIL();
    } catch (const ValidationError& e) {
        std::set<std::string> fields;
        for (const auto& v : e.violations()) {
            fields.insert(v.field);
        }
        EXPECT_EQ(fields, (std::set<std::string>{"annotation", "access.read", "preference.weight"}));
    }
}

TEST(ValidateStatement, FieldPaths) {
    auto st = tom_cruise();
    EXPECT_TRUE(validate_statement(st).empty());

    auto bad = st;
    std::get<Concept>(bad.predicate).text = "";
    ASSERT_EQ(validate_statement(bad).size(), 1u);
    EXPECT_EQ(validate_statement(bad)[0].field, "predicate.concept.text");

    bad = st;
    bad.subject = Iri{"not an iri"};
    // Subject and holder now disagree as well.
    auto v = validate_statement(bad);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].field, "subject");
    EXPECT_EQ(v[1].field, "preference.holder");

    bad = st;
    bad.preference->derived_from = Iri{"http://x.org/other"};
    ASSERT_EQ(validate_statement(bad).size(), 1u);
    EXPECT_EQ(validate_statement(bad)[0].field, "preference.derivedFrom");

    bad = st;
    EXPECT_EQ(validate_statement(bad, {std::nullopt, bad.provenance.created_on - std::chrono::seconds{1}}).size(),
              1u);
    EXPECT_TRUE(validate_statement(bad, {std::nullopt, bad.provenance.created_on}).empty());

    bad = st;
    std::get<Concept>(bad.object).text = "something else";
    // The topic still carries the old definition of the same concept id.
    ASSERT_EQ(validate_statement(bad).size(), 1u);
    EXPECT_EQ(validate_statement(bad)[0].field, "concepts");

    bad = st;
    bad.access.write.insert(kOwner);
    EXPECT_TRUE(validate_statement(bad).empty());
    EXPECT_EQ(validate_statement(bad, {kOwner, std::nullopt}).size(), 1u);
}

TEST(QuadsToStatement, RoundTripProperty) {
    testing::Rng rng(23);
    std::vector<Iri> services = {Iri{"http://svc.example/1"}, Iri{"http://svc.example/2"},
                                 Iri{"http://svc.example/3"}};
    for (int i = 0; i < 500; ++i) {
        auto st = testing::random_statement(rng, kOwner, services);
        auto quads = statement_to_quads(st, kOwner);
        // Unrelated statements in the same batch must not leak in.
        auto other = statement_to_quads(testing::random_statement(rng, kOwner, services), kOwner);
        quads.insert(quads.begin(), other.begin(), other.end());
        std::shuffle(quads.begin(), quads.end(), rng);
        ASSERT_EQ(quads_to_statement(quads, st.id), st) << i;
    }
}

TEST(QuadsToStatement, NamesMissingPieces) {
    auto st = tom_cruise();
    auto quads = statement_to_quads(st, kOwner);
    struct Case {
        Iri predicate;
        std::string missing;
    };
    for (const auto& c : std::vector<Case>{{vocab::rdf_subject, "rdf:subject"},
                                           {vocab::rdf_predicate, "rdf:predicate"},
                                           {vocab::rdf_object, "rdf:object"},
                                           {vocab::dcterms_description, "dcterms:description"},
                                           {vocab::pav_createdBy, "pav:createdBy"},
                                           {vocab::pav_createdOn, "pav:createdOn"},
                                           {vocab::pkg_topic, "pkg:topic"},
                                           {vocab::pkg_weight, "pkg:weight"},
                                           {vocab::skos_prefLabel, "skos:prefLabel"}}) {
        std::vector<Quad> partial;
        bool dropped = false;
        for (const auto& q : quads) {
            if (!dropped && q.predicate == c.predicate) {
                dropped = true;
                continue;
            }
            partial.push_back(q);
        }
        ASSERT_TRUE(dropped);
        try {
            quads_to_statement(partial, st.id);
            ADD_FAILURE() << c.missing;
        } catch (const StructuralError& e) {
            EXPECT_NE(std::find(e.missing().begin(), e.missing().end(), c.missing), e.missing().end())
                << c.missing << ": " << e.what();
        }
    }
    std::vector<Quad> no_type;
    for (const auto& q : quads) {
        if (!(q.subject == Term::iri(st.id) && q.predicate == vocab::rdf_type)) {
            no_type.push_back(q);
        }
    }
    EXPECT_THROW(quads_to_statement(no_type, st.id), StructuralError);
    EXPECT_THROW(quads_to_statement({}, st.id), StructuralError);
}

TEST(QuadsToStatement, DuplicateValuesAreStructuralErrors) {
    auto st = tom_cruise();
    auto quads = statement_to_quads(st, kOwner);
    quads.push_back({kOwner, Term::iri(st.id), vocab::rdf_subject, Term::iri("http://x.org/second")});
    try {
        quads_to_statement(quads, st.id);
        FAIL();
    } catch (const StructuralError& e) {
        EXPECT_EQ(e.missing(), std::vector<std::string>{"rdf:subject (multiple values)"});
    }
}

} // namespace
} // namespace pkg
