#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "randdiv/config.hpp"
#include "randdiv/error.hpp"
#include "randdiv/spectral.hpp"
#include "randdiv/wegner.hpp"

using namespace randdiv;

namespace {

const char* kAlloy = R"(
[process]
dimension = 1
G = 1
omega_minus = 1/4
omega_plus = 3/4
[family.hat]
kind = alloy
r = 1/2
M = 1
[field]
theta_E = 2
theta_L = 4
)";

const char* kBreather = R"(
[process]
dimension = 1
G = 1
omega_minus = 1/4
omega_plus = 3/4
[family.hat]
kind = breather
r = 1
M = 1
K = 4
[field]
theta_E = 2
)";

RandomConfig constant_config(const ProcessSpec& spec, double L, double value) {
    RandomConfig c;
    for (const Site& j : active_sites(spec, L)) c.values[j] = value;
    return c;
}

}  // namespace

TEST_CASE("smearing plateaus and slope") {
    const double eps = 0.1;
    const auto rho = build_smearing(eps);
    CHECK(rho(-2 * eps) == -1.0);
    CHECK(rho(2 * eps) == 0.0);
    CHECK(rho(0.0) == doctest::Approx(-0.5));
    double steepest = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = -eps + 2 * eps * i / 10000.0;
        steepest = std::max(steepest, std::abs(rho.derivative(x)));
        // Central difference oracle for the analytic derivative.
        const double fd = (rho(x + 1e-7) - rho(x - 1e-7)) / 2e-7;
        CHECK(rho.derivative(x) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
    CHECK(steepest <= 1.0 / eps);
    CHECK(steepest == doctest::Approx(15.0 / (16 * eps)).epsilon(1e-6));
    CHECK_THROWS_AS(build_smearing(0.0), Error);
}

TEST_CASE("smearing sandwich pointwise values") {
    const double eps = 0.05, E = 2.0;
    const auto rho = build_smearing(eps);
    auto middle = [&](double x) { return rho(x + 2 * eps - E) - rho(x - 2 * eps - E); };
    CHECK(middle(E) == 1.0);
    CHECK(middle(E + 4 * eps) == 0.0);
    const double edge = middle(E + 2 * eps);
    CHECK(edge >= 0.0);
    CHECK(edge <= 1.0);
    const auto r = smear_sandwich_check(rho, E, eps);
    CHECK(r.ok);
    CHECK(r.monotone);
    CHECK(r.worst_slack >= 0.0);
}

TEST_CASE("smeared trace") {
    const auto rho = build_smearing(0.1);
    const std::vector<double> ev{0.5, 1.0, 3.0};
    CHECK(smeared_trace(rho, ev, 2.0) == doctest::Approx(-2.0));
    CHECK(smeared_trace(rho, ev, 0.0) == 0.0);
}

TEST_CASE("difference bound") {
    SUBCASE("zero shift") {
        const auto spec = parse_config(kAlloy).process;
        const auto cfg = constant_config(spec, 4.0, 0.5);
        const auto r = difference_bound_check(spec, cfg, 0.0, 4.0);
        CHECK(r.ok);
        CHECK(r.height == 0.0);
    }
    SUBCASE("alloy closed form") {
        const auto spec = parse_config(kAlloy).process;
        const auto cfg = sample_config(spec, 3, 0, active_sites(spec, 4.0));
        const auto r = difference_bound_check(spec, cfg, 1.0 / 8, 4.0);
        CHECK(r.ok);
        CHECK(r.height == doctest::Approx(1.0 / 16));
        CHECK(r.delta == doctest::Approx(1.0 / 4));
        CHECK(r.covered_points > 0);
        // Off the union of balls the shift adds (1/8) v <= 1/8 <= M.
        CHECK(r.upper_slack >= 1.0 - 1.0 / 8 - 1e-12);
    }
    SUBCASE("breather annulus") {
        const auto spec = parse_config(kBreather).process;
        const auto cfg = constant_config(spec, 4.0, 0.5);
        const auto r = difference_bound_check(spec, cfg, 1.0 / 8, 4.0);
        CHECK(r.ok);
        CHECK(r.height == doctest::Approx(1.0 / 16));
        CHECK(r.delta == doctest::Approx(1.0 / 32));
    }
}

TEST_CASE("lifting curve") {
    const Config cfg = parse_config(kAlloy);
    const Grid grid(1, 4.0, 1.0 / 32);
    const auto omega = sample_config(cfg.process, 9, 0, active_sites(cfg.process, 4.0));
    const auto w = default_energy_window(grid, 2.0);
    const std::vector<double> mus{0.0, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    const auto r = lifting_curve(cfg.process, cfg.field, omega, 4.0, grid.h, mus, 6, w.E_minus,
                                 w.E_plus);
    CHECK(r.indices.size() == 6);
    CHECK(r.all_positive);
    CHECK(r.monotone_in_mu);
    for (const auto& row : r.lifts) {
        CHECK(row[0] == 0.0);
        CHECK(std::is_sorted(row.begin(), row.end()));
    }
    CHECK(r.tau_emp == doctest::Approx(1.0).epsilon(0.1));

    // First-order oracle for alloy coupling: the lift of lambda_1 under
    // V -> V + mu sum_j v_j is mu <grad psi, (sum v_j) grad psi> + O(mu^2).
    const auto base = random_operator(cfg.process, cfg.field, omega, grid);
    const auto s = eigs_lowest(base, 1);
    RandomConfig ones = omega;
    for (auto& [j, v] : ones.values) v = 1.0;
    RandomConfig zeros = omega;
    for (auto& [j, v] : zeros.values) v = 0.0;
    const auto Hv = random_operator(cfg.process, cfg.field, ones, grid);
    const auto H0 = random_operator(cfg.process, cfg.field, zeros, grid);
    const std::vector<double> psi(s.vectors.col(0).data(), s.vectors.col(0).data() + base.n);
    const double derivative = quadratic_form(Hv, psi) - quadratic_form(H0, psi);
    const double mu = 1.0 / 64;
    const auto fine = lifting_curve(cfg.process, cfg.field, omega, 4.0, grid.h, {mu}, 1,
                                    w.E_minus, w.E_plus);
    CHECK(fine.lifts[0][0] == doctest::Approx(mu * derivative).epsilon(0.02));

    CHECK_THROWS_AS(lifting_curve(cfg.process, cfg.field, omega, 4.0, grid.h, mus, 6, 1e3, 2e3),
                    Error);
}

TEST_CASE("lifting probe ordering") {
    const Config cfg = parse_config(kAlloy);
    const Grid grid(1, 4.0, 1.0 / 32);
    const auto omega = sample_config(cfg.process, 4, 0, active_sites(cfg.process, 4.0));
    const auto B = build_field(cfg.process, cfg.field, omega, grid);
    const auto Z = certificate_centers(cfg.process, omega, 1.0 / 8, 4.0);
    const auto w = default_energy_window(grid, 2.0);
    const auto r = lifting_lemma_probe(B, Z, 1.0, {1.0 / 8, 1.0 / 4}, {0.0, 0.5, 1.0}, w.E_minus,
                                       w.E_plus, 1);
    CHECK(r.ok);
    for (const auto& row : r.lifts) {
        CHECK(std::abs(row[0]) <= r.tolerance);
        CHECK(row[2] >= row[1] - r.tolerance);
    }
    for (std::size_t i = 0; i < r.lift_W.size(); ++i) {
        CHECK(r.lift_W[i] >= r.lift_minorant[i] - r.tolerance);
        CHECK(r.lift_minorant[i] >= r.lift_half[i] - r.tolerance);
    }
    CHECK_THROWS_AS(lifting_lemma_probe(B, Z, 1.0, {0.25}, {1.0}, 1e3, 2e3, 1), Error);
}

TEST_CASE("epsilon prime") {
    const auto a = epsilon_prime(std::pow(0.5, 1.5) / 4, 1.5, 0.5);
    CHECK(a.eps_prime == doctest::Approx(0.5));
    CHECK(epsilon_prime(1.0 / 8, 1.0, 1.0).eps_prime == doctest::Approx(0.5));
    CHECK(epsilon_prime(0.01, 2.0, 1.0).eps_prime == doctest::Approx(0.2));
    CHECK_THROWS_AS(epsilon_prime(0.5, 1.0, 1.0), Error);
}

TEST_CASE("interpolation chain") {
    RandomConfig omega;
    omega.values[{0, 0, 0}] = 0.3;
    omega.values[{1, 0, 0}] = 0.6;
    const auto one = interpolation_chain({{0, 0, 0}}, omega, 0.1);
    CHECK(one.steps() == 1);
    CHECK(one.at(1, 0.35).at({0, 0, 0}) == 0.35);
    CHECK(one.at(1, 0.35).at({1, 0, 0}) == 0.6);

    const auto two = interpolation_chain({{0, 0, 0}, {1, 0, 0}}, omega, 0.1);
    CHECK(two.at(2, 0.6).values == two.at(1, 0.3 + 0.1).values);
    CHECK(two.at(2, 0.7).at({0, 0, 0}) == doctest::Approx(0.4));

    const auto still = interpolation_chain({{0, 0, 0}, {1, 0, 0}}, omega, 0.0);
    for (std::size_t l = 1; l <= 2; ++l)
        CHECK(still.at(l, omega.at(still.enumeration[l - 1])).values == omega.values);
    CHECK_THROWS_AS(interpolation_chain({{1, 0, 0}}, omega, 0.5), Error);
}

TEST_CASE("telescoping with a single site") {
    Config cfg = parse_config(kAlloy);
    cfg.process.families.front().sites = SiteRange{{0, 0, 0}, {0, 0, 0}};
    const auto omega = sample_config(cfg.process, 2, 0, active_sites(cfg.process, 2.0));
    const auto r = telescope_check(cfg.process, cfg.field, omega, 0.25, 1.0, 0.5, 2.0, 1.0 / 16);
    CHECK(r.steps == 1);
    CHECK(r.chain_sum == r.direct);
    CHECK(r.ok);
}

TEST_CASE("spectral shift integral") {
    const Density kappa = Density::uniform(0.25, 0.75);
    const auto zero = shift_integral_check([](double) { return 0.0; }, {}, kappa, 0.1);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.ok);

    const double gamma = 1.0 / 8;
    const auto step = shift_integral_check([](double l) { return l < 0.5 ? -1.0 : 0.0; }, {0.5},
                                           kappa, gamma);
    CHECK(step.lhs == doctest::Approx(0.25));
    CHECK(step.rhs == doctest::Approx(0.25));
    CHECK(step.ok);

    // Smooth ramp: compare against a midpoint rule at fine resolution.
    auto ramp = [](double l) {
        const double s = std::clamp((l - 0.25) / 0.5, 0.0, 1.0);
        return -1.0 + s * s * (3 - 2 * s);
    };
    const auto r = shift_integral_check(ramp, {0.25, 0.75}, kappa, gamma);
    double mid = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double l = 0.25 + (i + 0.5) * 0.5 / n;
        mid += (ramp(l + gamma) - ramp(l)) * 2.0 * 0.5 / n;
    }
    CHECK(r.lhs == doctest::Approx(mid).epsilon(1e-8));
    CHECK(r.ok);
    CHECK_THROWS_AS(shift_integral_check([](double l) { return -l; }, {}, kappa, gamma), Error);
}

TEST_CASE("Monte Carlo window counts") {
    const Config cfg = parse_config(kAlloy);
    WegnerSetup setup;
    setup.L_values = {2.0};
    setup.epsilon_values = {40.0, 0.5};
    setup.E = 150.0;
    setup.E_minus = 0.1;
    setup.E_plus = 400.0;
    setup.h = 1.0 / 8;
    setup.samples = 12;
    setup.seed = 17;
    setup.bootstrap = 0;
    const auto r = wegner_monte_carlo(cfg.process, cfg.field, setup);
    const Grid grid(1, 2.0, setup.h);
    const auto Q = active_sites(cfg.process, 2.0);
    double total = 0.0;
    for (std::size_t s = 0; s < setup.samples; ++s) {
        const auto cfg_s = sample_config(cfg.process, setup.seed, s, Q);
        const auto ev = all_eigenvalues(random_operator(cfg.process, cfg.field, cfg_s, grid));
        const int dense = static_cast<int>(std::count_if(
            ev.begin(), ev.end(), [](double l) { return l >= 110.0 && l <= 190.0; }));
        CHECK(r.counts[0][s][0] == dense);
        CHECK(r.counts[0][s][1] >= 0);
        CHECK(r.counts[0][s][1] <= 1);
        total += dense;
    }
    CHECK(r.cells[0].mean == doctest::Approx(total / setup.samples));

    const auto serial = wegner_monte_carlo(cfg.process, cfg.field, setup, Exec::serial);
    CHECK(serial.counts == r.counts);
}

TEST_CASE("Monte Carlo without randomness has zero variance") {
    const Config cfg = parse_config("[process]\ndimension = 1\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n[field]\ntheta_E = 2\n");
    WegnerSetup setup;
    setup.L_values = {2.0};
    setup.epsilon_values = {1.0, 0.5};
    setup.E = 5.0;
    setup.E_minus = 1.0;
    setup.E_plus = 10.0;
    setup.h = 1.0 / 16;
    setup.samples = 8;
    setup.bootstrap = 0;
    const auto r = wegner_monte_carlo(cfg.process, cfg.field, setup);
    for (const auto& c : r.cells) CHECK(c.stderr_ == 0.0);
}

TEST_CASE("Monte Carlo setup checks") {
    const Config cfg = parse_config(kAlloy);
    WegnerSetup setup;
    setup.L_values = {4.0};
    setup.epsilon_values = {0.4};
    setup.E = 3.0;
    setup.E_minus = 2.0;
    setup.E_plus = 5.0;
    CHECK_THROWS_AS(check_wegner_setup(cfg.process, setup), Error);
    setup.E_minus = 1.0;
    CHECK_NOTHROW(check_wegner_setup(cfg.process, setup));
    setup.samples = 0;
    CHECK_THROWS_AS(check_wegner_setup(cfg.process, setup), Error);
}

TEST_CASE("tau remark probe") {
    CHECK_THROWS_AS(tau_remark_probe({0.5}, {10.0}, {1.0}), Error);
    const auto r = tau_remark_probe({0.5, 0.25, 0.1}, {10.0, 20.0, 40.0}, {1.0, 1.1, 1.3});
    CHECK_FALSE(r.degenerate);
    CHECK(r.slope > 0.0);
    CHECK(r.regressor.size() == 3);
    CHECK(r.regressor[0] == doctest::Approx(1 + std::pow(10.0, 2.0 / 3) + std::log(2.0)));
    CHECK(tau_remark_probe({0.5, 0.5, 0.5}, {10.0, 10.0, 10.0}, {1.0, 1.1, 1.3}).degenerate);
}

TEST_CASE("default energy window") {
    const Grid grid(1, 1.0, 0.25);
    const auto w = default_energy_window(grid, 2.0, 3);
    const double l1 = 32 * (1 - std::cos(M_PI / 4));
    const double l3 = 32 * (1 - std::cos(3 * M_PI / 4));
    CHECK(w.E_minus == doctest::Approx(l1 / 4));
    CHECK(w.E_plus == doctest::Approx(2 * l3));
}
