#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace randdiv {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
    // Percentile interval of the slope from the residual bootstrap; equals
    // the point estimate when no resamples were requested.
    double slope_lo = 0.0;
    double slope_hi = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Throws insufficient_data
/// for fewer than two points and precondition when x has zero variance.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// OLS plus a residual bootstrap (2.5% / 97.5% percentiles).
LinearFit ols_bootstrap(std::span<const double> x, std::span<const double> y, int resamples,
                        std::uint64_t seed);

/// Fit of log y against log x; all inputs must be positive.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y, int resamples = 200,
                     std::uint64_t seed = 1);

/// Common slope with one intercept per group (within-group demeaning);
/// `intercept` reports the mean group intercept.
struct Group {
    std::vector<double> x;
    std::vector<double> y;
};
LinearFit pooled_fit(const std::vector<Group>& groups, int resamples = 200, std::uint64_t seed = 1);

double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace randdiv
