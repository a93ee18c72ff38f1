#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "randdiv/assembly.hpp"
#include "randdiv/field.hpp"
#include "randdiv/fit.hpp"
#include "randdiv/model.hpp"
#include "randdiv/parallel.hpp"

namespace randdiv {

// ---------------------------------------------------------------------------
// Smearing

/// rho(x) = S((x + eps) / (2 eps)) - 1 with the quintic smootherstep S, so
/// rho = -1 left of -eps, rho = 0 right of eps and max |rho'| = 15 / (16 eps).
struct SmearingFunction {
    double epsilon = 1.0;

    double operator()(double x) const;
    double derivative(double x) const;
};

SmearingFunction build_smearing(double epsilon);

struct SmearReport {
    bool ok = true;
    double worst_x = 0.0;
    double worst_slack = 0.0;     // min over x of both sandwich slacks
    double max_derivative = 0.0;  // sampled max |rho'|
    bool monotone = true;
};

/// Checks 1_[E-eps,E+eps] <= rho(x+2eps-E) - rho(x-2eps-E) <= 1_[E-3eps,E+3eps]
/// on `points` equally spaced x in [E - 5 eps, E + 5 eps].
SmearReport smear_sandwich_check(const SmearingFunction& rho, double E, double epsilon,
                                 int points = 10000);

/// Sum over eigenvalues of rho(lambda - shift).
double smeared_trace(const SmearingFunction& rho, std::span<const double> eigenvalues,
                     double shift);

// ---------------------------------------------------------------------------
// Perturbation difference

struct DifferenceReport {
    bool ok = true;
    double upper_slack = 0.0;  // min of M - (V_shift - V)
    double lower_slack = 0.0;  // min of (V_shift - V) - height 1_S
    double height = 0.0;       // alpha mu^p
    double delta = 0.0;        // beta mu^q
    std::size_t points = 0;
    std::size_t covered_points = 0;  // grid points inside S
};

/// Sweeps a grid of spacing 1 / grid_resolution over the closed cube.
DifferenceReport difference_bound_check(const ProcessSpec& spec, const RandomConfig& cfg,
                                        double mu, double L, double grid_resolution = 64.0);

// ---------------------------------------------------------------------------
// Lifting

struct LiftingReport {
    std::vector<double> mu_values;
    std::vector<int> indices;                // contributing n (1-based)
    std::vector<double> base;                // lambda_n(omega) per contributing n
    std::vector<std::vector<double>> lifts;  // [index][mu]
    double tau_emp = 0.0;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    double prefactor = 0.0;
    double min_margin = 0.0;  // smallest lift at positive mu
    bool all_positive = true;
    bool monotone_in_mu = true;
};

/// n ranges over 1..n_max with lambda_n(omega) in [E_minus, E_plus].
/// Throws Error(empty_contributing_set) when no eigenvalue qualifies.
LiftingReport lifting_curve(const ProcessSpec& spec, const FieldSpec& field,
                            const RandomConfig& cfg, double L, double h,
                            const std::vector<double>& mu_values, int n_max, double E_minus,
                            double E_plus);

struct LiftingProbeReport {
    bool ok = true;            // nonnegative, nondecreasing in t, minorant ordering
    bool linear_bound = true;  // lift(t) >= t lift(1) - tol for every delta and t
    std::vector<double> delta_values;
    std::vector<double> t_values;
    std::vector<std::vector<double>> lifts;  // [delta][t]
    std::vector<double> lift_W;              // t = 1 lifts per delta for W
    std::vector<double> lift_minorant;       // ... for the Lipschitz minorant
    std::vector<double> lift_half;           // ... for eta delta 1_{S_{delta/2}}
    double delta_exponent = 0.0;             // slope of log lift(1) vs log delta
    double implied_N = 0.0;                  // exponent / (1 + E_plus^{2/3})
    double tolerance = 0.0;
    std::string failure;
};

/// W = eta delta 1_{S_{delta,Z}(L)} for each delta; Z supplies the centers.
LiftingProbeReport lifting_lemma_probe(const CoefficientField& B, const EquidistributedSequence& Z,
                                       double eta, const std::vector<double>& delta_values,
                                       const std::vector<double>& t_values, double E_minus,
                                       double E_plus, int n);

struct EpsilonPrime {
    double eps_tilde = 0.0;
    double eps_prime = 0.0;
};

EpsilonPrime epsilon_prime(double epsilon, double tau, double mu_prime);

// ---------------------------------------------------------------------------
// Interpolation chain

struct InterpolationChain {
    std::vector<Site> enumeration;
    RandomConfig omega;
    double mu = 0.0;

    std::size_t steps() const { return enumeration.size(); }
    /// nu^(l)(mu, s) for l in 1..steps().
    RandomConfig at(std::size_t l, double s) const;
};

InterpolationChain interpolation_chain(const std::vector<Site>& Q_enumeration,
                                       const RandomConfig& omega, double mu);

struct TelescopeReport {
    bool ok = true;
    double direct = 0.0;     // Tr rho(H_{omega + mu e} - E - 2eps) - Tr rho(H_omega - E - 2eps)
    double chain_sum = 0.0;  // sum_l Phi_l(omega_l + mu) - Phi_l(omega_l)
    double slack = 0.0;      // chain_sum - direct
    std::vector<double> terms;
    std::size_t steps = 0;
};

TelescopeReport telescope_check(const ProcessSpec& spec, const FieldSpec& field,
                                const RandomConfig& cfg, double mu, double E, double epsilon,
                                double L, double h);

// ---------------------------------------------------------------------------
// Spectral-shift integral

struct ShiftIntegralReport {
    bool ok = true;
    double lhs = 0.0;
    double rhs = 0.0;
    double error_estimate = 0.0;
};

/// int [Phi(l + gamma) - Phi(l)] dkappa(l) <= -gamma |g|_inf Phi(omega_minus).
/// `phi_breaks` lists points where Phi is not smooth.
ShiftIntegralReport shift_integral_check(const std::function<double(double)>& Phi,
                                         const std::vector<double>& phi_breaks,
                                         const Density& kappa, double gamma);

// ---------------------------------------------------------------------------
// Monte Carlo

struct WegnerCell {
    double epsilon = 0.0;
    double L = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

struct WegnerResult {
    std::vector<WegnerCell> cells;      // L-major, epsilon in input order
    std::vector<LinearFit> eps_fits;    // per L
    LinearFit eps_pooled;               // common epsilon slope across L
    std::vector<LinearFit> L_fits;      // per epsilon
    double L_exponent = 0.0;            // max over epsilon
    bool eps_fit_available = false;
    bool L_fit_available = false;
    bool eps_monotone = true;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    // counts[L index][sample][eps index]
    std::vector<std::vector<std::vector<int>>> counts;
};

struct WegnerSetup {
    std::vector<double> L_values;
    std::vector<double> epsilon_values;
    double E = 1.0;
    double E_minus = 0.5;
    double E_plus = 2.0;
    double h = 1.0 / 16;
    std::size_t samples = 64;
    std::uint64_t seed = 1;
    int bootstrap = 200;
};

/// Throws Error(precondition) naming every offending cell before any sampling.
void check_wegner_setup(const ProcessSpec& spec, const WegnerSetup& setup);

WegnerResult wegner_monte_carlo(const ProcessSpec& spec, const FieldSpec& field,
                                const WegnerSetup& setup, Exec exec = Exec::parallel);

struct TauRemarkReport {
    bool degenerate = false;  // regressor has zero variance
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;
    std::vector<double> regressor;  // 1 + E_+^{2/3} + |log E_-|
};

TauRemarkReport tau_remark_probe(const std::vector<double>& E_minus_values,
                                 const std::vector<double>& E_plus_values,
                                 const std::vector<double>& fitted_taus);

struct EnergyWindow {
    double E_minus = 0.0;
    double E_plus = 0.0;
};

/// E_- = lambda_1(-Delta_h) / (2 theta_E), E_+ = theta_E lambda_count(-Delta_h).
EnergyWindow default_energy_window(const Grid& grid, double theta_E, int count = 10);

}  // namespace randdiv
