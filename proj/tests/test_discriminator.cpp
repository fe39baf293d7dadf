#include <catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "intentforge/discriminator.hpp"
#include "intentforge/error.hpp"
#include "oracles.hpp"

using namespace intentforge;
using namespace intentforge::discriminator;
using Catch::Matchers::WithinAbs;
using testing::node;

namespace {

const std::string SRV = "src/main/java/demo/Server.java";
const std::string TST = "src/test/java/demo/ServerTest.java";

const CodeGraph& fixture_graph() {
    static const CodeGraph g = source::parse_project(testing::fixture("proj"), {}).graph;
    return g;
}

std::vector<std::tuple<std::string, std::string, int>> edge_list(const CodeGraph& g) {
    std::vector<std::tuple<std::string, std::string, int>> out;
    for (const auto& e : g.edges()) out.emplace_back(e.src, e.dst, static_cast<int>(e.kind));
    return out;
}

// Splits explore() output into the oracle's shape.
oracle::Closure as_closure(const std::vector<CrucialFact>& facts) {
    oracle::Closure c;
    for (const auto& f : facts) {
        if (const auto* n = std::get_if<NodeFact>(&f.subject)) c.nodes.insert(n->node);
        else {
            const auto& e = std::get<EdgeFact>(f.subject).edge;
            c.edges.emplace(e.src, e.dst, static_cast<int>(e.kind));
        }
    }
    return c;
}

// One method per name, plus usages whose text repeats names by given counts.
struct OccurrenceCase {
    CodeGraph graph;
    std::vector<CrucialFact> facts;
    std::vector<source::Usage> usages;
    std::vector<std::vector<int>> counts;
};

OccurrenceCase random_occurrence_case(std::mt19937& rng) {
    OccurrenceCase c;
    const std::size_t facts = 1 + rng() % 6, usages = rng() % 5;
    std::vector<EntityNode> nodes;
    for (std::size_t i = 0; i < facts; ++i) {
        auto name = "fn" + std::to_string(i);
        nodes.push_back(node("F#" + name + "()", NodeKind::Method, name, "void " + name + "()"));
        c.facts.push_back({NodeFact{nodes.back().id}, {}});
    }
    c.graph = CodeGraph(nodes, {}, "/r");
    for (std::size_t j = 0; j < usages; ++j) {
        std::vector<int> counts;
        std::string text = "void caller() {";
        for (std::size_t i = 0; i < facts; ++i) {
            counts.push_back(static_cast<int>(rng() % 4));
            for (int k = 0; k < counts.back(); ++k) text += " fn" + std::to_string(i) + "(); fn" + std::to_string(i) + "x();";
        }
        c.counts.push_back(counts);
        c.usages.push_back({"U#u" + std::to_string(j), text + " }", 1});
    }
    return c;
}

}  // namespace

TEST_CASE("make_seed: focal, reference test and constructor", "[discriminator]") {
    const auto& g = fixture_graph();
    auto seed = make_seed(g, SRV + "#Server.ignite(int)", TST + "#ServerTest.testIgnite()");
    CHECK(seed.nodes == std::vector<NodeId>{SRV + "#Server.Server()", SRV + "#Server.ignite(int)",
                                            TST + "#ServerTest.testIgnite()"});
    auto ctor_focal = make_seed(g, SRV + "#Server.Server(ThreadPool)", std::nullopt);
    CHECK(ctor_focal.nodes == std::vector<NodeId>{SRV + "#Server.Server(ThreadPool)"});
    CHECK_THROWS_AS(make_seed(g, "nope", std::nullopt), UnknownEntityError);
}

TEST_CASE("explore: examples", "[discriminator][explore]") {
    SECTION("isolated seeds") {
        CodeGraph g({node("A", NodeKind::Class, "A")}, {}, "/");
        CHECK(explore(g, {{"A"}}, 2).empty());
    }
    SECTION("overloaded constructor reached through the reference test") {
        const auto& g = fixture_graph();
        auto facts = explore(g, {{TST + "#ServerTest.testIgnite()"}}, 2);
        auto c = as_closure(facts);
        CHECK(c.nodes.count(SRV + "#Server.Server(ThreadPool)"));
        CHECK(c.edges.count({SRV + "#Server.Server(ThreadPool)", SRV + "#Server.Server()",
                             static_cast<int>(EdgeKind::Overload)}));
    }
    SECTION("unknown seed") {
        CHECK_THROWS_AS(explore(testing::diamond_graph(), {{"nope"}}, 2), UnknownEntityError);
    }
}

TEST_CASE("explore equals the BFS oracle", "[discriminator][explore][property]") {
    auto check = [](const CodeGraph& g, const std::vector<NodeId>& seeds, int depth) {
        INFO("depth " << depth << " seeds " << seeds.size());
        auto want = oracle::bfs(edge_list(g), {seeds.begin(), seeds.end()}, depth);
        auto got = as_closure(explore(g, {seeds}, depth));
        CHECK(got.nodes == want.nodes);
        CHECK(got.edges == want.edges);
        auto reversed = seeds;
        std::reverse(reversed.begin(), reversed.end());
        auto a = explore(g, {seeds}, depth), b = explore(g, {reversed}, depth);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].key() == b[i].key());
    };
    for (int depth : {1, 2, 3}) {
        check(testing::diamond_graph(), {"F#A.b()"}, depth);
        check(testing::diamond_graph(), {"F#A.a()"}, depth);
    }
    const auto& g = fixture_graph();
    for (int depth : {1, 2}) {
        check(g, make_seed(g, SRV + "#Server.ignite(int)", TST + "#ServerTest.testIgnite()").nodes, depth);
        check(g, make_seed(g, SRV + "#Server.threads()", std::nullopt).nodes, depth);
    }
}

TEST_CASE("explore: excluded nodes are never entered", "[discriminator][explore]") {
    const auto& g = fixture_graph();
    const std::string held_out = TST + "#ServerTest.create_withThreadPool()";
    auto facts = explore(g, make_seed(g, SRV + "#Server.create(ThreadPool)", std::nullopt), 3, {held_out});
    for (const auto& f : facts) CHECK(f.key().find("create_withThreadPool") == std::string::npos);
}

TEST_CASE("fact_occurrence: formula examples", "[discriminator][occurrence]") {
    CodeGraph g({node("F#f1()", NodeKind::Method, "f1"), node("F#f2()", NodeKind::Method, "f2")}, {}, "/");
    std::vector<CrucialFact> facts{{NodeFact{"F#f1()"}, {}}, {NodeFact{"F#f2()"}, {}}};
    CHECK(fact_occurrence(facts[0], {}, {}, facts, g) == 0.0);

    std::vector<source::Usage> one{{"u", "f1(); f1(); f1(); f2(); f1x();", 1}};
    CHECK_THAT(fact_occurrence(facts[0], one, {1.0}, facts, g), WithinAbs(0.75, 1e-12));

    std::vector<source::Usage> two{{"u1", "f1(); f2();", 1}, {"u2", "f1(f1);", 1}};
    CHECK_THAT(fact_occurrence(facts[0], two, {1.0, 0.5}, facts, g), WithinAbs(1.0, 1e-12));
    CHECK_THAT(fact_occurrence(facts[1], two, {1.0, 0.5}, facts, g), WithinAbs(0.5, 1e-12));
}

TEST_CASE("occurrence and likelihood match the oracle", "[discriminator][occurrence][property]") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0, 1);
    for (int round = 0; round < 200; ++round) {
        auto c = random_occurrence_case(rng);
        std::vector<double> alignments, sims;
        for (std::size_t j = 0; j < c.usages.size(); ++j) alignments.push_back(u(rng));
        for (std::size_t i = 0; i < c.facts.size(); ++i) sims.push_back(u(rng));
        auto got = occurrence_raw(c.facts, c.usages, alignments, c.graph);
        auto want = oracle::occurrence(c.counts, alignments, c.facts.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK_THAT(got[i], WithinAbs(want[i], 1e-9));
            CHECK(got[i] >= 0);
        }
        // per-usage shares sum to 1 whenever a usage mentions any candidate
        for (std::size_t j = 0; j < c.usages.size(); ++j) {
            auto single = occurrence_raw(c.facts, {c.usages[j]}, {1.0}, c.graph);
            double total = 0;
            for (double x : single) total += x;
            int counted = 0;
            for (int k : c.counts[j]) counted += k;
            CHECK_THAT(total, WithinAbs(counted ? 1.0 : 0.0, 1e-9));
        }
        auto ranked = combine_scores(c.facts, sims, got, {0.5, 3, true});
        auto norm = oracle::minmax(want);
        std::map<std::string, double> expected;
        for (std::size_t i = 0; i < c.facts.size(); ++i)
            expected[c.facts[i].key()] = oracle::likelihood(0.5, sims[i], norm[i]);
        for (const auto& f : ranked) {
            CHECK_THAT(f.likelihood, WithinAbs(expected.at(f.key()), 1e-9));
            CHECK(f.likelihood >= 0);
            CHECK(f.likelihood <= 1);
        }
        for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].likelihood >= ranked[i].likelihood);
    }
}

TEST_CASE("likelihood direct evaluation", "[discriminator][rank]") {
    CodeGraph g({node("F#a()", NodeKind::Method, "a"), node("F#b()", NodeKind::Method, "b")}, {}, "/");
    std::vector<CrucialFact> facts{{NodeFact{"F#a()"}, {}}, {NodeFact{"F#b()"}, {}}};
    // occu normalizes to (0.1 -> ...); feed occu directly through the unnormalized path
    auto ranked = combine_scores(facts, {0.9, 0.0}, {0.1, 0.0}, {0.5, 3, false});
    CHECK_THAT(ranked[0].likelihood, WithinAbs(0.5, 1e-12));
    CHECK(ranked[0].key() == "F#a()");
}

TEST_CASE("rank_facts: top-K equals an exhaustive evaluation", "[discriminator][rank]") {
    const auto& g = fixture_graph();
    auto candidates = explore(g, make_seed(g, SRV + "#Server.ignite(int)", TST + "#ServerTest.testIgnite()"), 1);
    candidates.resize(6);
    ValidationIntention desc{"Ignites the server on a port.", {"A server exists."}, {"getPort returns the port."}};
    std::vector<source::Usage> usages{{"u1", "server.ignite(8080); server.getPort(); Server s;", 1},
                                      {"u2", "new Server().ignite(1);", 1}};
    retrieval::HashEmbeddingProvider p;

    // Exhaustive: score every candidate independently, then pick the best 3.
    auto target = render_intention(desc);
    std::vector<double> alignments;
    for (const auto& u : usages) alignments.push_back(retrieval::semantic_sim(p, target, u.text));
    std::vector<std::vector<int>> counts;
    for (const auto& u : usages) {
        std::vector<int> row;
        for (const auto& f : candidates) row.push_back(oracle::count_word(u.text, anchor_name(f, g)));
        counts.push_back(row);
    }
    auto occu = oracle::minmax(oracle::occurrence(counts, alignments, candidates.size()));
    std::vector<std::pair<double, std::string>> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double sim = retrieval::semantic_sim(p, render_fact(candidates[i], g), target);
        scored.emplace_back(-oracle::likelihood(0.5, sim, occu[i]), candidates[i].key());
    }
    std::sort(scored.begin(), scored.end());

    auto top = rank_facts(candidates, desc, usages, p, g, {0.5, 3, true});
    REQUIRE(top.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top[i].key() == scored[i].second);
        CHECK_THAT(top[i].likelihood, WithinAbs(-scored[i].first, 1e-9));
        CHECK_FALSE(top[i].rendered.empty());
    }

    auto shuffled = candidates;
    std::reverse(shuffled.begin(), shuffled.end());
    auto again = rank_facts(shuffled, desc, usages, p, g, {0.5, 3, true});
    for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].key() == top[i].key());

    auto single = rank_facts({candidates[0]}, desc, {}, p, g);
    REQUIRE(single.size() == 1);
    CHECK(single[0].key() == candidates[0].key());
}

TEST_CASE("scaling alignments keeps the top-K", "[discriminator][rank][property]") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(0, 1), scale(0.01, 50);
    for (int round = 0; round < 300; ++round) {
        auto c = random_occurrence_case(rng);
        std::vector<double> alignments, scaled, sims;
        double k = scale(rng);
        for (std::size_t j = 0; j < c.usages.size(); ++j) {
            alignments.push_back(u(rng));
            scaled.push_back(alignments.back() * k);
        }
        for (std::size_t i = 0; i < c.facts.size(); ++i) sims.push_back(u(rng));
        auto a = combine_scores(c.facts, sims, occurrence_raw(c.facts, c.usages, alignments, c.graph), {});
        auto b = combine_scores(c.facts, sims, occurrence_raw(c.facts, c.usages, scaled, c.graph), {});
        for (std::size_t i = 0; i < std::min<std::size_t>(3, a.size()); ++i) CHECK(a[i].key() == b[i].key());
    }
}

TEST_CASE("render_fact", "[discriminator][render]") {
    CodeGraph g({node("S#Server", NodeKind::Class, "Server", "class Server", "Server.java", 1, 20),
                 node("S#Server.port", NodeKind::Field, "port", "int port", "Server.java", 2, 2),
                 node("S#Server.Server()", NodeKind::Constructor, "Server", "Server()", "Server.java", 3, 3),
                 node("S#Server.Server(ThreadPool)", NodeKind::Constructor, "Server", "Server(ThreadPool)",
                      "Server.java", 4, 6),
                 node("S#Server.getPort()", NodeKind::Method, "getPort", "int getPort()", "Server.java", 7, 9,
                      "public int getPort() {\n    return port;\n}"),
                 node("S#Server.big()", NodeKind::Method, "big", "void big()", "Server.java", 10, 19,
                      "void big() {\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n}")},
                {{"S#Server.Server(ThreadPool)", "S#Server.Server()", EdgeKind::Overload},
                 {"S#Server", "S#Server.port", EdgeKind::Define}},
                "/p");
    CHECK(render_fact({NodeFact{"S#Server.port"}, {}}, g) == "Field int port declared in Server.java");
    CHECK(render_fact({EdgeFact{{"S#Server.Server(ThreadPool)", "S#Server.Server()", EdgeKind::Overload}}, {}}, g) ==
          "Server(ThreadPool) is an overload of Server()");
    CHECK(render_fact({NodeFact{"S#Server.getPort()"}, {}}, g) ==
          "Method int getPort() declared in Server.java\npublic int getPort() {\n    return port;\n}");
    auto big = render_fact({NodeFact{"S#Server.big()"}, {}}, g);
    CHECK(big.find("\n9") != std::string::npos);
    CHECK(big.find("\n10") == std::string::npos);
    CHECK(render_fact({EdgeFact{{"S#Server", "S#Server.port", EdgeKind::Define}}, {}}, g) == "Server declares port");
    CHECK_THROWS_AS(render_fact({NodeFact{"missing"}, {}}, g), UnknownEntityError);
}
