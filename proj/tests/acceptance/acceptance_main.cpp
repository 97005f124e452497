// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "pkg/connector.hpp"
#include "pkg/error.hpp"
#include "pkg/sparql.hpp"
#include "pkg/turtle.hpp"
#include "stubs.hpp"

namespace {

using namespace pkg;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// Budgets and sizes, fixed here rather than taken from the environment.
constexpr auto kE2eBudget = std::chrono::milliseconds{1000};
constexpr auto kOracleBudget = std::chrono::seconds{30};
constexpr int kOracleCases = 1000;
constexpr int kRoundTrips = 500;
constexpr int kPolicyRounds = 200;
constexpr int kServices = 20;
constexpr int kFuzzCases = 10000;
constexpr int kCascadeGraphs = 100;
constexpr double kLowThreshold = 0.5;
constexpr double kHighThreshold = 0.95;
constexpr double kStubConfidence = 0.9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Records the first few failures; later ones only bump the count.
class Check {
public:
    void require(bool ok, const std::string& what) {
        if (ok) {
            return;
        }
        if (++failures_ <= 3) {
            notes_ << (failures_ > 1 ? "; " : "") << what;
        }
    }
    Outcome done(const std::string& summary) const {
        if (failures_ == 0) {
            return {true, summary};
        }
        return {false, std::to_string(failures_) + " failure(s): " + notes_.str()};
    }

private:
    int failures_ = 0;
    std::ostringstream notes_;
};

long ms_since(Clock::time_point start) {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

std::vector<Term> objects(const QuadStore& store, const Iri& g, const Term& s, const Iri& p) {
    std::vector<Term> out;
    for (const auto& row : store.match(g, {s, Term::iri(p), Variable{"o"}})) {
        out.push_back(row.at("o"));
    }
    return out;
}

std::vector<Term> subjects(const QuadStore& store, const Iri& g, const Iri& p, const Term& o) {
    std::vector<Term> out;
    for (const auto& row : store.match(g, {Variable{"s"}, Term::iri(p), o})) {
        out.push_back(row.at("s"));
    }
    return out;
}

bool is_concept_with_label(const QuadStore& store, const Iri& g, const Term& node, const std::string& label) {
    auto types = objects(store, g, node, vocab::rdf_type);
    auto labels = objects(store, g, node, vocab::skos_prefLabel);
    return types == std::vector<Term>{Term::iri(vocab::skos_Concept)} &&
           labels == std::vector<Term>{Term::literal(label)};
}

Outcome tom_cruise_e2e() {
    Check c;
    auto linker = std::make_shared<testing::StubLinker>();
    testing::ApiFixture f(linker);
    auto start = Clock::now();
    auto r = f.call("POST", "/pkg/alice/nl", f.owner_token,
                    json{{"statement", "I dislike all movies with the actor Tom Cruise"}}.dump());
    auto elapsed = Clock::now() - start;
    c.require(r.status == 200, "status " + std::to_string(r.status));
    c.require(r.status != 200 || json::parse(r.body)["intent"] == "ADD", "intent is not ADD");

    const auto& store = f.api->store();
    auto statements = subjects(store, f.owner, vocab::rdf_type, Term::iri(vocab::rdf_Statement));
    c.require(statements.size() == 1, "rdf:Statement count " + std::to_string(statements.size()));
    if (statements.size() == 1) {
        const auto& st = statements[0];
        c.require(objects(store, f.owner, st, vocab::rdf_subject) == std::vector<Term>{Term::iri(f.owner)},
                  "subject is not the owner IRI");
        auto p = objects(store, f.owner, st, vocab::rdf_predicate);
        c.require(p.size() == 1 && is_concept_with_label(store, f.owner, p[0], "dislike"),
                  "predicate is not the concept 'dislike'");
        auto o = objects(store, f.owner, st, vocab::rdf_object);
        c.require(o.size() == 1 && is_concept_with_label(store, f.owner, o[0], "all movies with the actor Tom Cruise"),
                  "object is not the expected concept");
        auto prefs = subjects(store, f.owner, vocab::rdf_type, Term::iri(vocab::pkg_Preference));
        c.require(prefs.size() == 1, "preference count " + std::to_string(prefs.size()));
        if (prefs.size() == 1 && o.size() == 1) {
            c.require(objects(store, f.owner, prefs[0], vocab::pkg_weight) ==
                          std::vector<Term>{Term::literal("-1.0", vocab::xsd_decimal)},
                      "weight is not -1.0");
            c.require(objects(store, f.owner, prefs[0], vocab::pkg_topic) == o, "topic is not the object");
            c.require(objects(store, f.owner, Term::iri(f.owner), vocab::pkg_preference) == prefs,
                      "owner does not hold the preference");
        }
    }
    c.require(elapsed < kE2eBudget, "took " + std::to_string(ms_since(start)) + " ms");
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    return c.done("1 statement, 2 concepts, weight -1.0, " + std::to_string(ms) + " ms");
}

Outcome bob_e2e() {
    Check c;
    auto a = rule_annotate("Bob likes Oppenheimer");
    c.require(a.intent == Intent::Add, "intent is not ADD");
    c.require(a.subject_text == "Bob" && a.predicate_text == "like" && a.object_text == "Oppenheimer",
              "triple is not <Bob, like, Oppenheimer>");
    c.require(a.preference_polarity == 1, "polarity is not +1");

    auto linker = std::make_shared<testing::StubLinker>();
    const Iri film{"http://dbpedia.org/resource/Oppenheimer_(film)"};
    linker->table["Oppenheimer"] = {{"Oppenheimer", film, kStubConfidence, LinkCandidate::Source::External}};
    auto run = [&](double threshold) {
        testing::ApiFixture f(linker, threshold);
        auto r = f.call("POST", "/pkg/alice/nl", f.owner_token, json{{"statement", "Bob likes Oppenheimer"}}.dump());
        c.require(r.status == 200, "status " + std::to_string(r.status));
        auto st = json::parse(r.body)["result"]["statement"];
        c.require(st["preference"]["weight"] == 1.0, "weight is not +1.0");
        auto quads = f.api->store().quads(f.owner);
        bool weight_literal = std::any_of(quads.begin(), quads.end(), [](const Quad& q) {
            return q.predicate == vocab::pkg_weight && q.object == Term::literal("+1.0", vocab::xsd_decimal);
        });
        c.require(weight_literal, "no \"+1.0\" weight literal");
        return st["object"];
    };
    auto low = run(kLowThreshold);
    c.require(low.contains("iri") && low["iri"] == film.str(), "threshold 0.5 did not resolve the object");
    auto high = run(kHighThreshold);
    c.require(high.contains("concept") && high["concept"]["text"] == "Oppenheimer",
              "threshold 0.95 did not fall back to a concept");
    return c.done("ADD <Bob, like, Oppenheimer> +1.0; IRI at 0.5, concept at 0.95");
}

Outcome query_oracle() {
    Check c;
    testing::Rng rng(20240601);
    auto start = Clock::now();
    std::size_t rows = 0;
    for (int i = 0; i < kOracleCases; ++i) {
        auto qc = testing::random_query_case(rng, 50, 3);
        QuadStore store;
        store.register_graph(qc.graph);
        store.insert(qc.quads);
        auto got = store.execute_select(qc.query);
        auto want = testing::brute_force_select(qc.quads, qc.query);
        rows += want.rows.size();
        c.require(got == want, "case " + std::to_string(i) + ": " + to_sparql(qc.query));
    }
    auto ms = ms_since(start);
    c.require(Clock::now() - start < kOracleBudget, "took " + std::to_string(ms) + " ms");
    return c.done(std::to_string(kOracleCases) + " cases, " + std::to_string(rows) + " rows, " +
                  std::to_string(ms) + " ms");
}

Outcome round_trips() {
    Check c;
    testing::Rng rng(20240602);
    const Iri owner{"http://pkg.example/alice"};
    std::vector<Iri> services{Iri{"http://pkg.example/service/a"}, Iri{"http://pkg.example/service/b"}};
    for (int i = 0; i < kRoundTrips; ++i) {
        auto st = testing::random_statement(rng, owner, services);
        auto quads = statement_to_quads(st, owner);
        c.require(quads_to_statement(quads, st.id) == st, "quads round-trip " + std::to_string(i));

        QuadStore a;
        a.register_graph(owner);
        a.insert(quads);
        auto text = export_turtle(a, owner);
        QuadStore b;
        b.register_graph(owner);
        import_turtle(b, owner, text);
        auto qa = a.quads(owner);
        auto qb = b.quads(owner);
        c.require(std::set<Quad>(qa.begin(), qa.end()) == std::set<Quad>(qb.begin(), qb.end()),
                  "turtle quad set " + std::to_string(i));
        c.require(quads_to_statement(qb, st.id) == st, "turtle statement " + std::to_string(i));
    }
    return c.done(std::to_string(kRoundTrips) + " statements, quads and Turtle");
}

Outcome access_soundness() {
    Check c;
    testing::Rng rng(20240603);
    testing::ApiFixture f;
    std::vector<std::pair<std::string, std::string>> services; // token, iri
    for (int i = 0; i < kServices; ++i) {
        auto name = "svc" + std::to_string(i);
        auto r = f.call("POST", "/admin/agents", "admin-secret",
                        json{{"kind", "service"}, {"name", name}, {"owners", {"alice"}}}.dump());
        services.emplace_back(json::parse(r.body)["token"], f.api->service_iri(name).str());
    }
    const char* utterances[] = {"I like jazz",     "I dislike opera",      "Bob likes Oppenheimer",
                                "I love hiking",   "I hate early mornings", "My sister lives in Oslo",
                                "I enjoy cooking", "I prefer tea",         "I avoid horror movies",
                                "Tom likes chess"};
    std::vector<std::string> ids;
    for (const char* u : utterances) {
        auto r = f.call("POST", "/pkg/alice/nl", f.owner_token, json{{"statement", u}}.dump());
        c.require(r.status == 200, std::string("could not add '") + u + "'");
        if (r.status == 200) {
            ids.push_back(json::parse(r.body)["result"]["id"]);
        }
    }
    std::size_t checks = 0;
    for (int round = 0; round < kPolicyRounds; ++round) {
        std::map<std::string, std::set<std::string>> readers;
        for (const auto& id : ids) {
            json read = json::array(), write = json::array();
            for (const auto& [token, iri] : services) {
                if (testing::coin(rng, 0.3)) {
                    read.push_back(iri);
                    readers[id].insert(iri);
                }
                if (testing::coin(rng, 0.1)) {
                    write.push_back(iri);
                }
            }
            auto r = f.call("PUT", "/pkg/alice/statements/" + id.substr(id.size() - 36) + "/access", f.owner_token,
                            json{{"read", read}, {"write", write}}.dump());
            c.require(r.status == 200, "PUT access " + std::to_string(r.status));
        }
        auto owner_view = json::parse(f.call("GET", "/pkg/alice/statements", f.owner_token).body);
        c.require(owner_view.size() == ids.size(), "owner saw " + std::to_string(owner_view.size()));
        auto owner_prefs = json::parse(f.call("GET", "/pkg/alice/preferences", f.owner_token).body);
        for (const auto& [token, iri] : services) {
            for (const auto& st : json::parse(f.call("GET", "/pkg/alice/statements", token).body)) {
                c.require(readers[st["id"]].count(iri) > 0, iri + " read " + st["id"].get<std::string>());
                ++checks;
            }
            for (const auto& p : json::parse(f.call("GET", "/pkg/alice/preferences", token).body)) {
                c.require(readers[p["derivedFrom"]].count(iri) > 0,
                          iri + " saw preference of " + p["derivedFrom"].get<std::string>());
                ++checks;
            }
            const auto& id = ids[testing::pick(rng, ids.size())];
            auto single = f.call("GET", "/pkg/alice/statements/" + id.substr(id.size() - 36), token);
            c.require((single.status == 200) == (readers[id].count(iri) > 0), "single GET " + id);
        }
        c.require(owner_prefs.size() >= 1, "owner sees no preferences");
    }
    return c.done(std::to_string(kPolicyRounds) + " policies x " + std::to_string(kServices) + " services, " +
                  std::to_string(checks) + " visible items checked");
}

Outcome nlu_corpus() {
    Check c;
    auto corpus = testing::load_corpus(testing::fixture_path("nlu_corpus.tsv"));
    std::set<Intent> intents;
    std::size_t polar = 0;
    for (const auto& e : corpus) {
        intents.insert(e.intent);
        polar += e.polarity ? 1 : 0;
        auto mismatch = testing::corpus_mismatch(e, rule_annotate(e.utterance));
        c.require(mismatch.empty(), "line " + std::to_string(e.line) + ": " + mismatch);
    }
    c.require(corpus.size() >= 30, "only " + std::to_string(corpus.size()) + " utterances");
    c.require(intents.size() == 4, "not all four intents covered");
    return c.done(std::to_string(corpus.size()) + " utterances, " + std::to_string(polar) +
                  " with polarity, 100%");
}

Outcome fuzz() {
    Check c;
    testing::Rng rng(20240604);
    const Iri g{"http://pkg.example/alice"};
    auto pick_input = [&](int i, const std::function<std::string(testing::Rng&)>& structured) {
        switch (i % 3) {
        case 0:
            return testing::random_bytes(rng, 128);
        case 1:
            return testing::random_unicode(rng, 96);
        default:
            return structured(rng);
        }
    };
    auto sentence = [](testing::Rng& r) {
        static const char* words[] = {"I",   "like", "don't", "what", "?",    "forget", "Bob", "never",
                                      "the", "my",   "about", "is",   "hate", "do",     "'",   "movies"};
        std::string out;
        for (std::size_t n = testing::pick(r, 10); n > 0; --n) {
            out += std::string(words[testing::pick(r, std::size(words))]) + " ";
        }
        return out;
    };
    for (int i = 0; i < kFuzzCases; ++i) {
        auto text = pick_input(i, sentence);
        try {
            auto a = rule_annotate(text);
            c.require(validate_annotation(a).empty(), "invalid annotation for case " + std::to_string(i));
        } catch (const std::exception& e) {
            c.require(false, std::string("rule_annotate threw: ") + e.what());
        }
    }
    std::size_t parsed = 0;
    for (int i = 0; i < kFuzzCases; ++i) {
        auto text = pick_input(i, testing::random_sparql_like);
        try {
            parse_sparql(text, g);
            ++parsed;
        } catch (const ParseError&) {
        } catch (const std::exception& e) {
            c.require(false, std::string("parse_sparql threw ") + e.what());
        }
    }
    for (int i = 0; i < kFuzzCases; ++i) {
        auto text = pick_input(i, testing::random_turtle_like);
        try {
            parse_turtle(text, g);
            ++parsed;
        } catch (const ParseError&) {
        } catch (const std::exception& e) {
            c.require(false, std::string("parse_turtle threw ") + e.what());
        }
    }
    return c.done(std::to_string(kFuzzCases) + " cases each, " + std::to_string(parsed) + " inputs parsed");
}

Outcome delete_cascade() {
    Check c;
    testing::Rng rng(20240605);
    const Iri owner{"http://pkg.example/alice"};
    std::size_t deleted = 0, shared_kept = 0;
    for (int round = 0; round < kCascadeGraphs; ++round) {
        auto world = testing::random_statement_graph(rng, owner, 3 + testing::pick(rng, 10));
        QuadStore store;
        store.register_graph(owner);
        for (const auto& st : world) {
            execute_action(store, PkgAction::add(st), owner);
        }
        std::vector<Iri> doomed;
        std::vector<PkgStatement> kept;
        std::vector<PkgStatement> gone;
        for (const auto& st : world) {
            if (testing::coin(rng, 0.4)) {
                doomed.push_back(st.id);
                gone.push_back(st);
            } else {
                kept.push_back(st);
            }
        }
        auto outcome = delete_statements(store, owner, doomed);
        deleted += outcome.removed;
        c.require(outcome.removed == doomed.size(), "removed count in graph " + std::to_string(round));
        for (const auto& st : gone) {
            c.require(store.match(owner, {Term::iri(st.id), Variable{"p"}, Variable{"o"}}).empty(),
                      "reification left for " + st.id.str());
            if (st.preference) {
                Term pref = Term::iri(st.preference->id);
                c.require(store.match(owner, {pref, Variable{"p"}, Variable{"o"}}).empty() &&
                              store.match(owner, {Variable{"s"}, Variable{"p"}, pref}).empty(),
                          "preference left for " + st.id.str());
            }
        }
        std::set<Iri> concepts;
        for (const auto& row :
             store.match(owner, {Variable{"c"}, Term::iri(vocab::rdf_type), Term::iri(vocab::skos_Concept)})) {
            concepts.insert(row.at("c").node_iri());
        }
        auto expected = testing::referenced_concepts(kept);
        c.require(concepts == expected, "concept set in graph " + std::to_string(round));
        for (const auto& id : testing::referenced_concepts(gone)) {
            shared_kept += expected.count(id);
        }
        for (const auto& st : kept) {
            c.require(fetch_statement(store, owner, st.id) == st, "survivor changed: " + st.id.str());
        }
    }
    return c.done(std::to_string(kCascadeGraphs) + " graphs, " + std::to_string(deleted) + " deletions, " +
                  std::to_string(shared_kept) + " shared concepts kept");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"e2e-tom-cruise", tom_cruise_e2e},
        {"e2e-bob-oppenheimer", bob_e2e},
        {"query-oracle-equivalence", query_oracle},
        {"round-trip", round_trips},
        {"access-control-soundness", access_soundness},
        {"nlu-corpus", nlu_corpus},
        {"fuzz-parsers", fuzz},
        {"delete-cascade", delete_cascade},
    };
    int failed = 0;
    for (const auto& criterion : criteria) {
        Outcome o;
        try {
            o = criterion.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", criterion.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
