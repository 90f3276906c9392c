#include "doctest.h"
#include "fixtures.hpp"

#include "factorarg/mining.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace factorarg;

namespace {

constexpr int kCases = 200;

std::vector<Variable> pool() {
    return {Variable("a", {"0", "1"}), Variable("b", {"0", "1", "2"}), Variable("c", {"0", "1"}),
            Variable("d", {"0", "1", "2"})};
}

std::vector<Variable> random_scope(std::mt19937_64& rng, std::size_t max = 3) {
    auto vars = pool();
    std::shuffle(vars.begin(), vars.end(), rng);
    vars.resize(std::uniform_int_distribution<std::size_t>(1, max)(rng));
    return vars;
}

} // namespace

TEST_CASE("factor product is commutative and associative") {
    std::mt19937_64 rng(100);
    for (int i = 0; i < kCases; ++i) {
        auto f = fixtures::random_factor(rng, random_scope(rng));
        auto g = fixtures::random_factor(rng, random_scope(rng));
        auto h = fixtures::random_factor(rng, random_scope(rng));
        auto fg = product(f, g), gf = product(g, f);
        CHECK(approx_equal(fg, reorder(gf, fg.scope()), 1e-12));
        auto l = product(product(f, g), h), r = product(f, product(g, h));
        CHECK(approx_equal(l, reorder(r, l.scope()), 1e-12));
    }
}

TEST_CASE("dividing out a product restores the factor on its support") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < kCases; ++i) {
        auto f = fixtures::random_factor(rng, random_scope(rng));
        auto g = fixtures::random_factor(rng, random_scope(rng, 2));
        // g is strictly positive here, so the quotient is f broadcast over g's scope
        auto back = divide(product(f, g), g);
        auto ones = Factor(g.scope(), std::vector<double>(g.size(), 1.0));
        auto want = product(f, ones);
        CHECK(approx_equal(back, reorder(want, back.scope()), 1e-12));
    }
}

TEST_CASE("marginalization order does not matter") {
    std::mt19937_64 rng(102);
    for (int i = 0; i < kCases; ++i) {
        auto scope = random_scope(rng, 4);
        if (scope.size() < 3) continue;
        auto f = fixtures::random_factor(rng, scope);
        const std::vector<Variable> keep{scope[0]};
        const std::vector<Variable> step1{scope[0], scope[2]};
        const std::vector<Variable> step2{scope[0], scope[1]};
        auto direct = marginalize(f, keep);
        CHECK(approx_equal(direct, marginalize(marginalize(f, step1), keep), 1e-12));
        CHECK(approx_equal(direct, marginalize(marginalize(f, step2), keep), 1e-12));
    }
}

TEST_CASE("implied logodds and distance ignore positive scaling") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> k(0.001, 1000);
    for (int i = 0; i < kCases; ++i) {
        Variable v = pool()[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
        auto f = fixtures::random_factor(rng, {v});
        auto g = fixtures::random_factor(rng, {v});
        std::vector<double> scaled;
        const double c = k(rng);
        for (double x : f.values()) scaled.push_back(c * x);
        Factor fs({v}, scaled);
        for (std::size_t o = 0; o < v.cardinality(); ++o)
            CHECK(implied_logodds(fs, o) == doctest::Approx(implied_logodds(f, o)).epsilon(1e-9));
        CHECK(factor_distance(fs, g) == doctest::Approx(factor_distance(f, g)).epsilon(1e-9));
        CHECK(factor_distance(f, f) == doctest::Approx(0.0));
    }
}

TEST_CASE("argument properties on random networks") {
    std::mt19937_64 rng(104);
    int checked = 0;
    while (checked < kCases) {
        auto net = std::make_shared<DiscreteNetwork>(fixtures::random_network(rng, 6, 3, false, 2));
        FactorGraph g(net);
        const auto target = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
        auto ev = fixtures::random_evidence(rng, *net, 3, target);
        if (ev.empty()) continue;
        const auto simple = all_simple_arguments(g, target, ev, 8);
        if (simple.size() < 2) continue;
        ++checked;

        const auto& a = simple[std::uniform_int_distribution<std::size_t>(0, simple.size() - 1)(rng)];
        const auto& b = simple[std::uniform_int_distribution<std::size_t>(0, simple.size() - 1)(rng)];

        // subargument is a partial order
        CHECK(is_subargument(a, a));
        if (is_subargument(a, b) && is_subargument(b, a)) CHECK(a == b);

        if (auto u = try_union(a, b)) {
            CHECK(is_subargument(a, *u));
            CHECK(is_subargument(b, *u));
            // decomposing a union of simple arguments and re-uniting gives it back
            const auto parts = decompose_simple(*u, g);
            CHECK(argument_union(parts) == *u);
            CHECK(std::find(parts.begin(), parts.end(), a) != parts.end());
            // independence only gets easier with a looser threshold
            const Argument pair[] = {a, b};
            if (a != b && is_independent(pair, g, 0.1)) CHECK(is_independent(pair, g, 1.0));
            if (a != b && !is_independent(pair, g, 1.0)) CHECK_FALSE(is_independent(pair, g, 0.1));
        }

        // strength ignores the scale of the target effect
        const auto eff = target_effect(a, g);
        std::vector<double> scaled;
        for (double x : eff.values()) scaled.push_back(3.7 * x);
        const Factor s(eff.scope(), scaled);
        for (std::size_t o = 0; o < eff.size(); ++o) {
            const double x = implied_logodds(eff, o), y = implied_logodds(s, o);
            if (std::isfinite(x))
                CHECK(y == doctest::Approx(x).epsilon(1e-9));
            else
                CHECK(y == x);
        }
    }
}
