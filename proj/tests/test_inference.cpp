#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace factorarg;
using fixtures::asia;
using fixtures::asia_graph;

namespace {

double max_error(const FactorGraph& g, const EvidenceSet& ev) {
    const auto bp = posterior_beliefs(g, ev);
    double err = 0;
    for (std::size_t v = 0; v < g.variable_count(); ++v) {
        const auto exact = enumerate_posterior(g.network(), ev, g.network().variable(v).name());
        for (std::size_t s = 0; s < exact.size(); ++s) err = std::max(err, std::abs(exact[s] - bp.belief(v)[s]));
    }
    return err;
}

} // namespace

TEST_CASE("enumeration oracle on a hand-computed query") {
    // P(lung=yes | smoke=yes) is read straight off the CPT
    auto p = enumerate_posterior(asia(), {{"smoke", "yes"}}, "lung");
    CHECK(p[0] == doctest::Approx(0.1));
    // prior P(either=yes) = 1 - P(lung=no) P(tub=no)
    const double lung_no = 0.5 * 0.9 + 0.5 * 0.99, tub_no = 0.01 * 0.95 + 0.99 * 0.99;
    CHECK(enumerate_posterior(asia(), {}, "either")[0] == doctest::Approx(1 - lung_no * tub_no));
}

TEST_CASE("message passing is exact on polytrees") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 25; ++rep) {
        auto net = std::make_shared<DiscreteNetwork>(fixtures::random_network(rng, 7, 3, true));
        FactorGraph g(net);
        auto ev = fixtures::random_evidence(rng, *net, 3);
        CHECK(max_error(g, ev) < 1e-9);
    }
}

TEST_CASE("message passing on loopy ASIA converges near the exact answer") {
    const EvidenceSet ev{{"xray", "yes"}, {"dysp", "yes"}};
    auto bp = posterior_beliefs(asia_graph(), ev);
    CHECK(bp.converged);
    CHECK(bp.iterations < 200);
    CHECK(max_error(asia_graph(), ev) < 0.05);
}

TEST_CASE("prior beliefs match enumeration") {
    // dysp's parents are correlated through smoke, which loopy passing ignores
    CHECK(max_error(asia_graph(), {}) < 0.01);
    const auto bp = posterior_beliefs(asia_graph(), {});
    for (const char* v : {"asia", "tub", "smoke", "lung", "bronc", "either", "xray"})
        CHECK(bp.belief(asia().index_of(v))[0] == doctest::Approx(enumerate_posterior(asia(), {}, v)[0]).epsilon(1e-9));
    const double p = enumerate_posterior(asia(), {}, "lung")[0];
    CHECK(prior_odds(asia_graph(), "lung", "yes") == doctest::Approx(p / (1 - p)).epsilon(1e-6));
}

TEST_CASE("contradictory evidence is reported") {
    // either is a deterministic OR of lung and tub
    const EvidenceSet ev{{"either", "no"}, {"tub", "yes"}};
    CHECK_THROWS_AS(posterior_beliefs(asia_graph(), ev), ContradictionError);
    CHECK_THROWS_AS(enumerate_posterior(asia(), ev, "lung"), ContradictionError);
}

TEST_CASE("non-convergence is reported, not raised") {
    MessagePassingOptions opts;
    opts.max_iters = 1;
    auto bp = posterior_beliefs(asia_graph(), {{"xray", "yes"}}, opts);
    CHECK_FALSE(bp.converged);
    CHECK(bp.iterations == 1);
    CHECK(bp.belief(0).total() == doctest::Approx(1.0));
    opts.max_iters = 0;
    CHECK_THROWS(posterior_beliefs(asia_graph(), {}, opts));
}

TEST_CASE("enumeration refuses huge joints") {
    CHECK_THROWS_AS(enumerate_posterior(asia(), {}, "lung", 100), std::length_error);
}

TEST_CASE("odds of a distribution") {
    Variable v("v", {"a", "b", "c"});
    Factor d({v}, {0.5, 0.25, 0.25});
    CHECK(odds_of(d, 0) == doctest::Approx(1.0));
    CHECK(odds_of(d, 1) == doctest::Approx(1.0 / 3));
    CHECK(std::isinf(odds_of(Factor({v}, {1, 0, 0}), 0)));
}

TEST_CASE("unknown evidence is rejected before inference") {
    CHECK_THROWS_AS(posterior_beliefs(asia_graph(), {{"xray", "blue"}}), ValidationError);
}
