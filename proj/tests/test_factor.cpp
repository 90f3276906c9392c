#include "doctest.h"
#include "fixtures.hpp"

#include "factorarg/factor.hpp"

#include <cmath>
#include <limits>

using namespace factorarg;

namespace {
const Variable A("A", {"a0", "a1"});
const Variable B("B", {"b0", "b1", "b2"});
const Variable C("C", {"c0", "c1"});
} // namespace

TEST_CASE("factor construction validates its table") {
    CHECK_NOTHROW(Factor({A, B}, {1, 2, 3, 4, 5, 6}));
    CHECK_THROWS_AS(Factor({A, B}, {1, 2, 3}), FactorError);
    CHECK_THROWS_AS(Factor({A, A}, {1, 2, 3, 4}), FactorError);
    CHECK_THROWS_AS(Factor({A}, {1, -1}), FactorError);
    CHECK_THROWS_AS(Factor({A}, {1, std::nan("")}), FactorError);
    CHECK_THROWS_AS(Factor({A}, {1, std::numeric_limits<double>::infinity()}), FactorError);
    CHECK_THROWS_AS(Variable("V", {"x", "x"}), FactorError);
}

TEST_CASE("row-major layout: last scope variable varies fastest") {
    Factor f({A, B}, {1, 2, 3, 4, 5, 6});
    const std::size_t idx[] = {1, 2};
    CHECK(f.at(idx) == 6);
    const std::size_t idx2[] = {0, 1};
    CHECK(f.at(idx2) == 2);
    CHECK(f.describe_assignment(4) == "A=a1, B=b1");
    CHECK(f.total() == doctest::Approx(21));
}

TEST_CASE("product matches the pointwise definition") {
    Factor f({A, B}, {1, 2, 3, 4, 5, 6});
    Factor g({B, C}, {1, 10, 2, 20, 3, 30});
    Factor h = product(f, g);
    REQUIRE(h.scope().size() == 3);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t c = 0; c < 2; ++c) {
                std::size_t fa[] = {a, b}, ga[] = {b, c};
                std::vector<std::size_t> ha(3);
                for (std::size_t i = 0; i < 3; ++i) {
                    const auto& v = h.scope()[i];
                    ha[i] = v.name() == "A" ? a : v.name() == "B" ? b : c;
                }
                CHECK(h.at(ha) == doctest::Approx(f.at(fa) * g.at(ga)));
            }
}

TEST_CASE("product rejects same-name variables with different states") {
    Variable A2("A", {"x", "y"});
    CHECK_THROWS_AS(product(Factor({A}, {1, 2}), Factor({A2}, {1, 2})), FactorError);
}

TEST_CASE("divide: 0/0 is 0 and positive/0 is an error") {
    Factor num({A, C}, {0, 2, 3, 4});
    Factor den({A}, {0, 2});
    CHECK_THROWS_AS(divide(num, den), FactorError);
    Factor num2({A, C}, {0, 0, 3, 4});
    Factor q = divide(num2, den);
    CHECK(q[0] == 0);
    CHECK(q[1] == 0);
    CHECK(q[2] == doctest::Approx(1.5));
    CHECK(q[3] == doctest::Approx(2.0));
    CHECK_THROWS_AS(divide(Factor({A}, {1, 1}), Factor({C}, {1, 1})), FactorError);
}

TEST_CASE("marginalize sums out and follows the keep order") {
    Factor f({A, B}, {1, 2, 3, 4, 5, 6});
    const Variable keepB[] = {B};
    Factor mb = marginalize(f, keepB);
    CHECK(mb[0] == 5);
    CHECK(mb[1] == 7);
    CHECK(mb[2] == 9);
    const Variable keepBA[] = {B, A};
    Factor ba = marginalize(f, keepBA);
    CHECK(ba.scope()[0].name() == "B");
    const std::size_t idx[] = {2, 0};
    CHECK(ba.at(idx) == 3);
    Factor none = marginalize(f, std::span<const Variable>{});
    CHECK(none.scope().empty());
    CHECK(none[0] == 21);
}

TEST_CASE("normalize and reorder") {
    Factor f({A, B}, {1, 2, 3, 4, 5, 6});
    CHECK(normalize(f).total() == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalize(Factor({A}, {0, 0})), FactorError);
    const Variable order[] = {B, A};
    Factor r = reorder(f, order);
    CHECK(approx_equal(r, f));
    CHECK(r[1] == 4);
}

TEST_CASE("implied logodds and its sentinels") {
    Factor f({B}, {2, 1, 3});
    CHECK(implied_logodds(f, "b0") == doctest::Approx(std::log(2.0 / 2.0)));
    CHECK(implied_logodds(f, 2) == doctest::Approx(std::log(3.0 / 1.5)));
    CHECK(implied_logodds(Factor({A}, {1, 0}), 0) == std::numeric_limits<double>::infinity());
    CHECK(implied_logodds(Factor({A}, {0, 1}), 0) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS(implied_logodds(f, "nope"));
    CHECK_THROWS_AS(implied_logodds(Factor({A, C}, {1, 1, 1, 1}), 0), FactorError);
}

TEST_CASE("factor distance") {
    Factor f({A}, {0.9, 0.1});
    CHECK(factor_distance(f, f) == 0.0);
    CHECK(factor_distance(f, Factor({A}, {1.8, 0.2})) == doctest::Approx(0.0));
    Factor g({A}, {0.5, 0.5});
    CHECK(factor_distance(f, g) == doctest::Approx(std::log(9.0)));
    CHECK(factor_distance(Factor({A}, {1, 0}), Factor({A}, {1, 1})) == std::numeric_limits<double>::infinity());
    CHECK(factor_distance(Factor({A}, {1, 0}), Factor({A}, {2, 0})) == doctest::Approx(0.0));
}

TEST_CASE("indicator and constant factors") {
    Factor i = indicator_factor(B, "b1");
    CHECK(i[0] == 0);
    CHECK(i[1] == 1);
    CHECK_THROWS(indicator_factor(B, "zz"));
    Factor c = constant_factor(B);
    CHECK(c.total() == 3);
}
