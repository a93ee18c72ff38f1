#include <doctest.h>

#include <cmath>

#include "randdiv/error.hpp"
#include "randdiv/fit.hpp"
#include "randdiv/rng.hpp"

using namespace randdiv;

TEST_CASE("exact line") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = ols(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.points == 4);
}

TEST_CASE("degenerate inputs") {
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(ols(one, one), Error);
    const std::vector<double> flat{2, 2, 2}, y{1, 2, 3};
    CHECK_THROWS_AS(ols(flat, y), Error);
    const std::vector<double> neg{-1.0, 1.0};
    CHECK_THROWS_AS(loglog_fit(neg, neg), Error);
}

TEST_CASE("power law recovered by the log-log fit") {
    std::vector<double> x, y;
    for (double v : {0.05, 0.1, 0.2, 0.4}) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 0.7));
    }
    const auto f = loglog_fit(x, y, 200, 5);
    CHECK(f.slope == doctest::Approx(0.7));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
    CHECK(f.slope_lo == doctest::Approx(0.7));
    CHECK(f.slope_hi == doctest::Approx(0.7));
}

TEST_CASE("bootstrap interval brackets the estimate and is deterministic") {
    Rng rng(11);
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(i);
        y.push_back(0.5 * i + (rng.uniform() - 0.5));
    }
    const auto a = ols_bootstrap(x, y, 200, 3);
    const auto b = ols_bootstrap(x, y, 200, 3);
    CHECK(a.slope_lo <= a.slope);
    CHECK(a.slope <= a.slope_hi);
    CHECK(a.slope_lo < a.slope_hi);
    CHECK(a.slope_lo == b.slope_lo);
    CHECK(a.slope_hi == b.slope_hi);
    const auto none = ols_bootstrap(x, y, 0, 3);
    CHECK(none.slope_lo == none.slope);
}

TEST_CASE("pooled fit removes group offsets") {
    std::vector<Group> groups;
    for (double offset : {0.0, 5.0, -2.0}) {
        Group g;
        for (double v : {1.0, 2.0, 3.0}) {
            g.x.push_back(v);
            g.y.push_back(offset + 1.5 * v);
        }
        groups.push_back(g);
    }
    const auto f = pooled_fit(groups, 50, 1);
    CHECK(f.slope == doctest::Approx(1.5));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.points == 9);
}

TEST_CASE("pearson correlation") {
    const std::vector<double> x{1, 2, 3}, up{2, 4, 6}, down{3, 2, 1};
    CHECK(pearson(x, up) == doctest::Approx(1.0));
    CHECK(pearson(x, down) == doctest::Approx(-1.0));
}
