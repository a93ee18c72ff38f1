#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "randdiv/error.hpp"
#include "randdiv/field.hpp"
#include "randdiv/spectral.hpp"

using namespace randdiv;

namespace {

DiscreteOperator laplacian(int dim, double L, double h, double scale = 1.0) {
    const Grid g(dim, L, h);
    Matrix3 A = identity_matrix(dim);
    for (double& v : A) v *= scale;
    return assemble_operator(
        g, CoefficientField::sample(
               g, [=](const Point&) { return A; }, [](const Point&) { return 0.0; },
               std::max(scale, 1.0 / scale), 0.0));
}

}  // namespace

TEST_CASE("discrete Laplacian matches its closed form") {
    const double h = 0.25;
    const auto s = eigs_lowest(laplacian(1, 1.0, h), 3);
    for (int m = 1; m <= 3; ++m)
        CHECK(s.eigenvalues[m - 1] ==
              doctest::Approx(2.0 / (h * h) * (1 - std::cos(M_PI * m * h))).epsilon(1e-12));
    for (double r : s.residual_norms) CHECK(r <= kResidualTolerance);
}

TEST_CASE("ground state converges to pi^2 at second order") {
    double prev = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        const double err = std::abs(eigs_lowest(laplacian(1, 1.0, h), 1).eigenvalues[0] - M_PI * M_PI);
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("dense and iterative paths agree") {
    const auto H = laplacian(2, 2.0, 1.0 / 16);
    const auto d = eigs_lowest(H, 6, EigenMethod::dense);
    const auto it = eigs_lowest(H, 6, EigenMethod::iterative);
    CHECK(it.method == EigenMethod::iterative);
    for (int i = 0; i < 6; ++i)
        CHECK(it.eigenvalues[i] == doctest::Approx(d.eigenvalues[i]).epsilon(1e-10));
    const auto all = all_eigenvalues(H);
    CHECK(all.size() == H.n);
    CHECK(all[0] == doctest::Approx(d.eigenvalues[0]).epsilon(1e-12));
    CHECK(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("large operator uses the iterative solver") {
    const auto H = laplacian(2, 3.0, 1.0 / 16);  // 47^2 unknowns
    REQUIRE(H.n > kDenseLimit);
    const auto s = eigs_lowest(H, 4);
    CHECK(s.method == EigenMethod::iterative);
    const std::vector<double> exact = laplacian_analytic(2, 3.0, 4);
    for (int i = 0; i < 4; ++i) CHECK(s.eigenvalues[i] == doctest::Approx(exact[i]).epsilon(0.01));
}

TEST_CASE("invalid k") {
    const auto H = laplacian(1, 1.0, 0.25);
    CHECK_THROWS_AS(eigs_lowest(H, 0), Error);
    CHECK_THROWS_AS(eigs_lowest(H, 4), Error);
}

TEST_CASE("scalar multiple of the identity") {
    DiscreteOperator H;
    H.grid = Grid(1, 1.0, 1.0 / 8);
    H.n = 7;
    for (std::size_t i = 0; i < H.n; ++i) {
        H.row_ptr.push_back(i);
        H.col.push_back(i);
        H.val.push_back(3.5);
    }
    H.row_ptr.push_back(H.n);
    for (double v : eigs_lowest(H, 7).eigenvalues) CHECK(v == doctest::Approx(3.5));
}

TEST_CASE("analytic Dirichlet spectrum") {
    const double p2 = M_PI * M_PI;
    const auto one = laplacian_analytic(1, 1.0, 3);
    CHECK(one[0] == doctest::Approx(p2));
    CHECK(one[1] == doctest::Approx(4 * p2));
    CHECK(one[2] == doctest::Approx(9 * p2));
    const auto two = laplacian_analytic(2, 1.0, 4);
    CHECK(two[0] == doctest::Approx(2 * p2));
    CHECK(two[1] == doctest::Approx(5 * p2));
    CHECK(two[2] == doctest::Approx(5 * p2));
    CHECK(two[3] == doctest::Approx(8 * p2));
    const auto wide = laplacian_analytic(1, 2.0, 2);
    CHECK(wide[0] == doctest::Approx(p2 / 4));
    CHECK(wide[1] == doctest::Approx(p2));
}

TEST_CASE("counting function") {
    CHECK(counting_function(1, 1.0, 5.0).analytic == 0);
    CHECK(counting_function(1, 1.0, 10.0).analytic == 1);
    CHECK(counting_function(2, 1.0, 2 * M_PI * M_PI).analytic == 1);
    for (double E : {1e2, 1e3, 1e4}) {
        const double ratio = counting_function(1, 1.0, E).analytic / std::sqrt(E);
        CHECK(std::abs(ratio - 1 / M_PI) <= 1.0 / std::sqrt(E));
    }
    const double E = 5e3;
    const double dilation = static_cast<double>(counting_function(2, 2.0, E).analytic) /
                            counting_function(2, 1.0, E).analytic;
    CHECK(dilation == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("counting sandwich") {
    const auto single = counting_sandwich(1, 1.0, {100.0});
    REQUIRE(single.size() == 1);
    CHECK(single[0].K1 == doctest::Approx(single[0].ratio));
    CHECK(single[0].K2 == doctest::Approx(single[0].ratio));
    const auto sweep = counting_sandwich(2, 1.0, {1e2, 1e3, 1e4});
    for (const auto& b : sweep) {
        CHECK(b.ok);
        CHECK(b.K1 <= b.ratio);
        CHECK(b.ratio <= b.K2);
    }
    CHECK_THROWS_AS(counting_sandwich(1, 1.0, {1.0}), Error);
}

TEST_CASE("ellipticity sandwich") {
    const auto Id = laplacian(1, 2.0, 1.0 / 32);
    CHECK(sandwich_check(Id, Id, 1.0, 10).ok);
    const auto twice = laplacian(1, 2.0, 1.0 / 32, 2.0);
    const auto r = sandwich_check(twice, Id, 2.0, 10);
    CHECK(r.ok);
    for (int n = 0; n < 10; ++n) CHECK(r.lambda_A[n] == doctest::Approx(2 * r.lambda_Id[n]));
    const auto thrice = laplacian(1, 2.0, 1.0 / 32, 3.0);
    CHECK_FALSE(sandwich_check(thrice, Id, 2.0, 10).ok);
}

TEST_CASE("window counts") {
    CHECK(count_in_window(std::vector<double>{1.0, 2.0, 3.0}, 0.2, 0.1) == 0);
    const auto fine = laplacian(1, 1.0, 1.0 / 64);
    CHECK(trace_window(fine, M_PI * M_PI, 1.0) == 1);
    const double h = 0.125;
    const auto coarse = laplacian(1, 1.0, h);
    const double l1 = 2 / (h * h) * (1 - std::cos(M_PI * h));
    const double l3 = 2 / (h * h) * (1 - std::cos(3 * M_PI * h));
    CHECK(trace_window(coarse, (l1 + l3) / 2, (l3 - l1) / 2 * (1 + 1e-9)) == 3);
    CHECK_THROWS_AS(trace_window(coarse, 4 / (h * h), 1.0), Error);
}
