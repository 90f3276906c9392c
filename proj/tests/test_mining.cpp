#include "doctest.h"
#include "fixtures.hpp"

#include "factorarg/mining.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace factorarg;
using fixtures::asia;
using fixtures::asia_graph;
using fixtures::chain;

namespace {

// Independent path counter: plain recursion over the undirected bipartite
// graph with an explicit visited set and no shared state with the library.
std::size_t count_paths(const FactorGraph& g, std::size_t at, std::size_t target, const std::set<std::size_t>& observed,
                        std::vector<int>& seen, std::size_t edges, std::size_t cap) {
    if (at == target) return 1;
    if (edges >= cap) return 0;
    std::size_t total = 0;
    for (auto nb : g.neighbors(at)) {
        if (seen[nb]) continue;
        if (!g.is_factor(nb) && nb != target && observed.count(nb)) continue;
        seen[nb] = 1;
        total += count_paths(g, nb, target, observed, seen, edges + 1, cap);
        seen[nb] = 0;
    }
    return total;
}

std::size_t oracle_count(const FactorGraph& g, const EvidenceSet& ev, std::size_t target, std::size_t cap = 1000) {
    std::set<std::size_t> observed;
    for (const auto& [k, v] : ev) observed.insert(g.network().index_of(k));
    std::size_t total = 0;
    for (auto o : observed) {
        std::vector<int> seen(g.node_count(), 0);
        seen[o] = 1;
        total += count_paths(g, o, target, observed, seen, 0, cap);
    }
    return total;
}

std::size_t lung() { return asia().index_of("lung"); }

} // namespace

TEST_CASE("simple arguments include the xray chain") {
    const auto& g = asia_graph();
    const auto args = all_simple_arguments(g, lung(), {{"xray", "yes"}});
    const auto want = chain(g, {"xray", "CPT(xray)", "either", "CPT(either)", "lung"}, "yes");
    CHECK(std::find(args.begin(), args.end(), want) != args.end());
    for (const auto& a : args) CHECK(a.is_simple());
}

TEST_CASE("single hop: only the paths through the shared CPT") {
    const auto& g = asia_graph();
    const auto args = all_simple_arguments(g, lung(), {{"smoke", "yes"}}, 2);
    REQUIRE(args.size() == 1);
    CHECK(args[0] == chain(g, {"smoke", "CPT(lung)", "lung"}, "yes"));
}

TEST_CASE("simple argument count matches an independent path enumerator") {
    const auto& g = asia_graph();
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 12; ++rep) {
        const auto target = std::uniform_int_distribution<std::size_t>(0, 7)(rng);
        auto ev = fixtures::random_evidence(rng, asia(), 3, target);
        if (ev.empty()) ev[asia().variable((target + 1) % 8).name()] = "yes";
        CHECK(all_simple_arguments(g, target, ev).size() == oracle_count(g, ev, target));
        CHECK(all_simple_arguments(g, target, ev, 4).size() == oracle_count(g, ev, target, 4));
    }
}

TEST_CASE("paths through observed variables are discarded") {
    const auto& g = asia_graph();
    // every route from xray to lung crosses either
    CHECK(all_simple_arguments(g, lung(), {{"xray", "yes"}, {"either", "yes"}}).size() ==
          oracle_count(g, {{"xray", "yes"}, {"either", "yes"}}, lung()));
    for (const auto& a : all_simple_arguments(g, lung(), {{"xray", "yes"}, {"either", "yes"}}))
        CHECK(a.premises().begin()->first != asia().index_of("xray"));
}

TEST_CASE("observed target is an error") {
    CHECK_THROWS(all_simple_arguments(asia_graph(), lung(), {{"lung", "yes"}}));
}

TEST_CASE("bronc and dysp query mines exactly two arguments") {
    const auto& g = asia_graph();
    const auto out = all_local_arguments(g, lung(), 0, {{"bronc", "yes"}, {"dysp", "no"}}, {});
    CHECK(out.size() == 2);
}

TEST_CASE("three-observation query: the xray-tub argument and the bronc chain") {
    const auto& g = asia_graph();
    const auto out = all_local_arguments(g, lung(), 0, {{"xray", "yes"}, {"tub", "no"}, {"bronc", "no"}}, {});
    REQUIRE(out.size() == 2);
    const auto xray_tub = argument_union(chain(g, {"xray", "CPT(xray)", "either", "CPT(either)", "lung"}, "yes"),
                                     chain(g, {"tub", "CPT(either)", "lung"}, "no"));
    CHECK(out[0].argument == xray_tub);
    CHECK(out[1].argument == chain(g, {"bronc", "CPT(bronc)", "smoke", "CPT(lung)", "lung"}, "no"));
    CHECK(out[0].strength == doctest::Approx(2.9755).epsilon(0.001));
}

TEST_CASE("mining output invariants") {
    const auto& g = asia_graph();
    std::mt19937_64 rng(21);
    const MiningConfig cfg;
    for (int rep = 0; rep < 30; ++rep) {
        const auto target = std::uniform_int_distribution<std::size_t>(0, 7)(rng);
        auto ev = fixtures::random_evidence(rng, asia(), 4, target);
        if (ev.empty()) continue;
        const auto out = all_local_arguments(g, target, 0, ev, cfg);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto& a = out[i].argument;
            CHECK(a.target() == target);
            for (const auto& [v, s] : a.premises()) {
                auto it = ev.find(asia().variable(v).name());
                REQUIRE(it != ev.end());
                CHECK(asia().variable(v).states()[s] == it->second);
            }
            if (i > 0) CHECK(std::abs(out[i - 1].strength) >= std::abs(out[i].strength));
            for (std::size_t j = 0; j < out.size(); ++j) {
                if (i == j) continue;
                CHECK_FALSE(is_subargument(a, out[j].argument));
                const Argument pair[] = {a, out[j].argument};
                // merges that would create a cycle or clash are left apart
                if (try_union(a, out[j].argument)) CHECK(is_independent(pair, g, cfg.threshold));
            }
        }
    }
}

TEST_CASE("d-separated evidence yields an empty list") {
    // either observed blocks every route from xray to lung
    const auto out = all_local_arguments(asia_graph(), lung(), 0, {{"xray", "yes"}, {"either", "yes"}},
                                         MiningConfig{0.5, std::nullopt, std::nullopt});
    for (const auto& s : out) CHECK(s.argument.premises().count(asia().index_of("xray")) == 0);
    const auto none = all_local_arguments(asia_graph(), lung(), 0, {{"xray", "yes"}}, MiningConfig{0.5, 1, 1});
    CHECK(none.empty());
}

TEST_CASE("config validation and defaults") {
    CHECK_THROWS(MiningConfig{-1.0, std::nullopt, std::nullopt}.validate());
    CHECK_THROWS(MiningConfig{0.5, 0, std::nullopt}.validate());
    CHECK_THROWS(MiningConfig{0.5, std::nullopt, 0}.validate());
    const auto d = MiningConfig::defaults_for(asia());
    CHECK(d.threshold == 0.5);
    CHECK_FALSE(d.max_path_length);
    CHECK_FALSE(d.complexity_limit);
    std::mt19937_64 rng(1);
    const auto big = fixtures::random_network(rng, 13, 2, false);
    CHECK(*MiningConfig::defaults_for(big).max_path_length == 7);
    CHECK(*MiningConfig::defaults_for(big).complexity_limit == 3);
}

TEST_CASE("caps set to the maximum reproduce the uncapped result") {
    const auto& g = asia_graph();
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 15; ++rep) {
        const auto target = std::uniform_int_distribution<std::size_t>(0, 7)(rng);
        auto ev = fixtures::random_evidence(rng, asia(), 4, target);
        if (ev.empty()) continue;
        const auto exact = all_local_arguments(g, target, 0, ev, {});
        const auto capped = all_local_arguments(g, target, 0, ev, MiningConfig{0.5, 1000, 1000});
        REQUIRE(exact.size() == capped.size());
        for (std::size_t i = 0; i < exact.size(); ++i) CHECK(exact[i].argument == capped[i].argument);
    }
}

TEST_CASE("remove_subarguments keeps maximal elements") {
    const auto& g = asia_graph();
    const auto x = chain(g, {"xray", "CPT(xray)", "either", "CPT(either)", "lung"}, "yes");
    const auto t = chain(g, {"tub", "CPT(either)", "lung"}, "no");
    const auto u = argument_union(x, t);
    const auto out = remove_subarguments({x, u, t, x});
    REQUIRE(out.size() == 1);
    CHECK(out[0] == u);
}

TEST_CASE("argument JSON carries the effect and strength") {
    const auto& g = asia_graph();
    const auto out = all_local_arguments(g, lung(), 0, {{"xray", "yes"}, {"tub", "no"}}, {});
    REQUIRE(out.size() == 1);
    const auto j = argument_json(out[0], g);
    CHECK(j["target"] == "lung");
    CHECK(j["premises"]["xray"] == "yes");
    CHECK(j["effect"]["yes"].get<double>() == doctest::Approx(0.9515).epsilon(0.0005));
    CHECK(j["edges"].size() == 5);
}
