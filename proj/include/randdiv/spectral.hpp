#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "randdiv/assembly.hpp"

namespace randdiv {

enum class EigenMethod { automatic, dense, iterative };

const char* to_string(EigenMethod m);

/// Lowest eigenvalues in nondecreasing order with certified residuals.
struct SpectrumSlice {
    std::vector<double> eigenvalues;
    std::vector<double> residual_norms;
    int k = 0;
    EigenMethod method = EigenMethod::dense;
    Eigen::MatrixXd vectors;  // n x k, columns normalized
};

inline constexpr std::size_t kDenseLimit = 2000;
inline constexpr double kResidualTolerance = 1e-8;

/// Dense solve for n <= kDenseLimit under `automatic`; otherwise block
/// shift-invert Krylov with Rayleigh-Ritz on H. Throws Error(invalid_parameter)
/// for k outside [1, n] and Error(solver_failure) when residuals do not meet
/// 1e-8 * max(1, |lambda|).
SpectrumSlice eigs_lowest(const DiscreteOperator& H, int k,
                          EigenMethod method = EigenMethod::automatic);

/// All eigenvalues by a dense solve (tridiagonal path in d = 1).
std::vector<double> all_eigenvalues(const DiscreteOperator& H);

/// First `count` Dirichlet-Laplacian eigenvalues pi^2 |m|^2 / L^2, m in N^d.
std::vector<double> laplacian_analytic(int dim, double L, int count);

struct CountingResult {
    long analytic = 0;      // #{m : pi^2 |m|^2 / L^2 <= E}
    long wide_radius = 0;  // #{m : |m| < (2/pi) L E^{1/2}}
};

CountingResult counting_function(int dim, double L, double E_tilde);

struct CountingBounds {
    double E_tilde = 0.0;
    long exact_count = 0;
    long wide_radius_count = 0;
    double ratio = 0.0;  // count / (E^{d/2} L^d)
    double K1 = 0.0;
    double K2 = 0.0;
    bool ok = true;
};

/// Largest K1 and smallest K2 bracketing count / (E^{d/2} L^d) over the inputs,
/// with the per-energy verification.
std::vector<CountingBounds> counting_sandwich(int dim, double L, const std::vector<double>& energies);

struct SandwichReport {
    bool ok = true;
    int k = 0;
    std::vector<double> lambda_A;
    std::vector<double> lambda_Id;
    double worst_lower_slack = 0.0;  // min over n of (lambda_A - lambda_Id/theta) / lambda_A
    double worst_upper_slack = 0.0;  // min over n of (theta lambda_Id - lambda_A) / lambda_A
};

SandwichReport sandwich_check(const DiscreteOperator& H_A, const DiscreteOperator& H_Id,
                              double theta_E, int k);

/// Number of eigenvalues in the closed window [E - eps, E + eps].
int count_in_window(std::span<const double> eigenvalues, double E, double eps);

/// Window count from eigs_lowest with k doubled until the window is bracketed.
/// Throws Error(spectrum_exhausted) when E + eps exceeds the largest eigenvalue.
int trace_window(const DiscreteOperator& H, double E, double eps);

}  // namespace randdiv
