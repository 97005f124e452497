#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include "generators.hpp"
#include "oracles.hpp"
#include "pkg/error.hpp"
#include "pkg/store.hpp"

namespace pkg {
namespace {

const Iri kG{"http://pkg.example/alice"};
const Iri kOther{"http://pkg.example/bob"};

Quad q(const char* s, const char* p, Term o, const Iri& g = kG) { return {g, Term::iri(Iri{s}), Iri{p}, std::move(o)}; }

TriplePattern tp(PatternTerm s, PatternTerm p, PatternTerm o) { return {std::move(s), std::move(p), std::move(o)}; }
Variable v(const char* name) { return Variable{name}; }
Term iri(const char* s) { return Term::iri(Iri{s}); }

class StoreTest : public ::testing::Test {
protected:
    void SetUp() override {
        store.register_graph(kG);
        store.register_graph(kOther);
    }
    QuadStore store;
};

TEST_F(StoreTest, InsertIsSetSemanticsAndMovesRevisionOnlyOnChange) {
    auto quad = q("http://x.org/a", "http://x.org/p", Term::literal("v"));
    EXPECT_EQ(store.revision(), 0u);
    EXPECT_EQ(store.insert(std::vector{quad}), 1u);
    EXPECT_EQ(store.insert(std::vector{quad}), 1u);
    EXPECT_EQ(store.size(kG), 1u);
    EXPECT_EQ(store.size(kOther), 0u);
    EXPECT_EQ(store.erase(std::vector{quad}), 2u);
    EXPECT_EQ(store.erase(std::vector{quad}), 2u);
    EXPECT_EQ(store.size(kG), 0u);
}

TEST_F(StoreTest, RegisterIsIdempotent) {
    store.insert(std::vector{q("http://x.org/a", "http://x.org/p", iri("http://x.org/b"))});
    store.register_graph(kG);
    EXPECT_EQ(store.size(kG), 1u);
    EXPECT_EQ(store.graphs().size(), 2u);
    EXPECT_THROW(store.register_graph(Iri{"no iri"}), StoreError);
}

TEST_F(StoreTest, UnregisteredGraphRejectsWholeBatch) {
    std::vector<Quad> batch{q("http://x.org/a", "http://x.org/p", iri("http://x.org/b")),
                            q("http://x.org/a", "http://x.org/p", iri("http://x.org/b"), Iri{"http://pkg.example/eve"})};
    EXPECT_THROW(store.insert(batch), StoreError);
    EXPECT_EQ(store.size(kG), 0u);
    EXPECT_EQ(store.revision(), 0u);
    EXPECT_FALSE(store.has_graph(Iri{"http://pkg.example/eve"}));
    EXPECT_TRUE(store.quads(Iri{"http://pkg.example/eve"}).empty());
}

TEST_F(StoreTest, MalformedQuadsAreRejected) {
    std::vector<Quad> literal_subject{{kG, Term::literal("x"), Iri{"http://x.org/p"}, iri("http://x.org/b")}};
    EXPECT_THROW(store.insert(literal_subject), StoreError);
    std::vector<Quad> bad_predicate{{kG, iri("http://x.org/a"), Iri{"p"}, iri("http://x.org/b")}};
    EXPECT_THROW(store.insert(bad_predicate), StoreError);
    EXPECT_EQ(store.revision(), 0u);
}

TEST_F(StoreTest, GraphsAreIsolated) {
    store.insert(std::vector{q("http://x.org/a", "http://x.org/p", iri("http://x.org/b")),
                             q("http://x.org/c", "http://x.org/p", iri("http://x.org/d"), kOther)});
    auto rows = store.match(kG, tp(v("s"), iri("http://x.org/p"), v("o")));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].at("s"), iri("http://x.org/a"));
    SelectQuery sq{{}, kOther, {tp(v("s"), v("p"), v("o"))}, {}};
    auto table = store.execute_select(sq);
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0][0], iri("http://x.org/c"));
}

TEST_F(StoreTest, LiteralsDistinguishDatatypeAndLanguage) {
    store.insert(std::vector{q("http://x.org/a", "http://x.org/p", Term::literal("1")),
                             q("http://x.org/a", "http://x.org/p", Term::literal("1", vocab::xsd_decimal)),
                             q("http://x.org/a", "http://x.org/p", Term::lang_literal("1", "en"))});
    EXPECT_EQ(store.size(kG), 3u);
    auto rows = store.match(kG, tp(v("s"), v("p"), Term::literal("1", vocab::xsd_decimal)));
    EXPECT_EQ(rows.size(), 1u);
}

TEST_F(StoreTest, JoinFiltersAndOrdering) {
    store.insert(std::vector{
        q("http://x.org/s1", "http://x.org/label", Term::literal("Tom Cruise")),
        q("http://x.org/s2", "http://x.org/label", Term::literal("tom cruise")),
        q("http://x.org/s3", "http://x.org/label", Term::literal("Nicole")),
        q("http://x.org/st", "http://x.org/about", iri("http://x.org/s2")),
        q("http://x.org/st", "http://x.org/about", iri("http://x.org/s3")),
    });
    SelectQuery ci{{"s"}, kG, {tp(v("s"), iri("http://x.org/label"), v("l"))},
                   {Filter{"l", Term::literal("tom cruise"), true}}};
    auto table = store.execute_select(ci);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0][0], iri("http://x.org/s1"));
    EXPECT_EQ(table.rows[1][0], iri("http://x.org/s2"));

    SelectQuery exact{{"s"}, kG, {tp(v("s"), iri("http://x.org/label"), v("l"))},
                      {Filter{"l", Term::literal("tom cruise"), false}}};
    EXPECT_EQ(store.execute_select(exact).rows.size(), 1u);

    SelectQuery join{{}, kG,
                     {tp(iri("http://x.org/st"), iri("http://x.org/about"), v("s")),
                      tp(v("s"), iri("http://x.org/label"), v("l"))},
                     {}};
    table = store.execute_select(join);
    EXPECT_EQ(table.variables, (std::vector<std::string>{"s", "l"}));
    EXPECT_EQ(table.rows.size(), 2u);
}

TEST_F(StoreTest, RepeatedVariableMustBindConsistently) {
    store.insert(std::vector{q("http://x.org/a", "http://x.org/p", iri("http://x.org/a")),
                             q("http://x.org/a", "http://x.org/p", iri("http://x.org/b"))});
    auto rows = store.match(kG, tp(v("x"), iri("http://x.org/p"), v("x")));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].at("x"), iri("http://x.org/a"));
}

TEST_F(StoreTest, MalformedQueriesAreStoreErrors) {
    EXPECT_THROW(store.execute_select({{"nope"}, kG, {tp(v("s"), v("p"), v("o"))}, {}}), StoreError);
    EXPECT_THROW(store.execute_select({{"s", "s"}, kG, {tp(v("s"), v("p"), v("o"))}, {}}), StoreError);
    EXPECT_THROW(store.execute_select({{}, kG, {tp(Term::literal("x"), v("p"), v("o"))}, {}}), StoreError);
    EXPECT_THROW(store.execute_select({{}, kG, {tp(v("s"), Term::literal("p"), v("o"))}, {}}), StoreError);
    EXPECT_THROW(store.execute_select({{}, kG, {tp(v("s"), v("p"), v("o"))}, {Filter{"z", Term::literal("a")}}}),
                 StoreError);
    EXPECT_THROW(
        store.execute_select({{}, kG, {tp(v("s"), v("p"), v("o"))}, {Filter{"o", iri("http://x.org/a"), true}}}),
        StoreError);
    EXPECT_THROW(store.execute_select({{}, Iri{"bad"}, {tp(v("s"), v("p"), v("o"))}, {}}), StoreError);
    EXPECT_THROW(store.execute_select({{}, kG, {tp(v("bad name"), v("p"), v("o"))}, {}}), StoreError);
}

TEST_F(StoreTest, UnknownGraphSelectsNothing) {
    auto table = store.execute_select({{}, Iri{"http://pkg.example/eve"}, {tp(v("s"), v("p"), v("o"))}, {}});
    EXPECT_EQ(table.variables, (std::vector<std::string>{"s", "p", "o"}));
    EXPECT_TRUE(table.rows.empty());
}

TEST_F(StoreTest, UpdatesInsertAndDeleteWhere) {
    UpdateQuery ins{InsertData{{q("http://x.org/a", "http://x.org/p", iri("http://x.org/b")),
                                q("http://x.org/a", "http://x.org/q", iri("http://x.org/c")),
                                q("http://x.org/z", "http://x.org/q", iri("http://x.org/c"))}}};
    store.execute_update(ins);
    EXPECT_EQ(store.size(kG), 3u);
    UpdateQuery del{DeleteWhere{kG, {tp(iri("http://x.org/a"), v("p"), v("o"))}}};
    auto before = store.revision();
    EXPECT_GT(store.execute_update(del), before);
    auto rest = store.quads(kG);
    ASSERT_EQ(rest.size(), 1u);
    EXPECT_EQ(rest[0].subject, iri("http://x.org/z"));
}

TEST(StoreOracle, MatchesBruteForceOnRandomQueries) {
    testing::Rng rng(101);
    for (int i = 0; i < 300; ++i) {
        auto c = testing::random_query_case(rng);
        QuadStore store;
        store.register_graph(c.graph);
        store.insert(c.quads);
        auto expected = testing::brute_force_select(c.quads, c.query);
        ASSERT_EQ(store.execute_select(c.query), expected) << "case " << i;
    }
}

TEST(StoreOracle, EraseThenReinsertIsIdentity) {
    testing::Rng rng(202);
    for (int i = 0; i < 100; ++i) {
        auto c = testing::random_query_case(rng);
        QuadStore store;
        store.register_graph(c.graph);
        store.insert(c.quads);
        auto before = store.quads(c.graph);
        std::vector<Quad> half;
        for (const auto& quad : c.quads) {
            if (testing::coin(rng)) {
                half.push_back(quad);
            }
        }
        store.erase(half);
        for (const auto& quad : half) {
            EXPECT_TRUE(store.match(c.graph, tp(quad.subject, Term::iri(quad.predicate), quad.object)).empty());
        }
        store.insert(half);
        EXPECT_EQ(store.quads(c.graph), before);
    }
}

TEST(StoreConcurrency, ParallelWritersOnDistinctGraphs) {
    QuadStore store;
    constexpr int kThreads = 8;
    constexpr int kPerThread = 200;
    std::vector<Iri> graphs;
    for (int t = 0; t < kThreads; ++t) {
        graphs.emplace_back("http://pkg.example/u" + std::to_string(t));
        store.register_graph(graphs.back());
    }
    std::vector<std::thread> threads;
    for (int t = 0; t < kThreads; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < kPerThread; ++i) {
                Quad quad{graphs[t], Term::iri(Iri{"http://x.org/s" + std::to_string(i)}), Iri{"http://x.org/p"},
                          Term::literal(std::to_string(i))};
                store.insert(std::vector{quad});
                store.execute_select({{}, graphs[t], {{Variable{"s"}, Variable{"p"}, Variable{"o"}}}, {}});
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (const auto& g : graphs) {
        EXPECT_EQ(store.size(g), static_cast<std::size_t>(kPerThread));
    }
    EXPECT_EQ(store.revision(), static_cast<std::uint64_t>(kThreads * kPerThread));
}

} // namespace
} // namespace pkg
