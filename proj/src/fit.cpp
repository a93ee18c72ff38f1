#include "randdiv/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "randdiv/error.hpp"
#include "randdiv/rng.hpp"

namespace randdiv {

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Fills slope_lo / slope_hi from the bootstrap replicates.
void percentile_interval(std::vector<double> slopes, LinearFit& fit) {
    if (slopes.empty()) {
        fit.slope_lo = fit.slope_hi = fit.slope;
        return;
    }
    std::sort(slopes.begin(), slopes.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(slopes.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const std::size_t j = std::min(i + 1, slopes.size() - 1);
        return slopes[i] + (pos - static_cast<double>(i)) * (slopes[j] - slopes[i]);
    };
    fit.slope_lo = at(0.025);
    fit.slope_hi = at(0.975);
}

}  // namespace

LinearFit ols(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorKind::dimension_mismatch, "fit inputs differ in length");
    require(x.size() >= 2, ErrorKind::insufficient_data, "a line fit needs at least two points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, ErrorKind::precondition, "regressor has zero variance");
    LinearFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.slope_lo = fit.slope_hi = fit.slope;
    return fit;
}

LinearFit ols_bootstrap(std::span<const double> x, std::span<const double> y, int resamples,
                        std::uint64_t seed) {
    LinearFit fit = ols(x, y);
    const std::size_t n = x.size();
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    Rng rng(seed);
    std::vector<double> slopes, ystar(n);
    slopes.reserve(static_cast<std::size_t>(std::max(resamples, 0)));
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            ystar[i] = fit.intercept + fit.slope * x[i] + resid[rng.below(n)];
        slopes.push_back(ols(x, ystar).slope);
    }
    percentile_interval(std::move(slopes), fit);
    return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y, int resamples,
                     std::uint64_t seed) {
    require(x.size() == y.size(), ErrorKind::dimension_mismatch, "fit inputs differ in length");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::precondition,
                "log-log fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return ols_bootstrap(lx, ly, resamples, seed);
}

LinearFit pooled_fit(const std::vector<Group>& groups, int resamples, std::uint64_t seed) {
    std::vector<double> dx, dy, offsets;
    std::vector<std::size_t> owner;
    std::vector<double> gx_mean, gy_mean;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& grp = groups[g];
        require(grp.x.size() == grp.y.size(), ErrorKind::dimension_mismatch,
                "fit group inputs differ in length");
        if (grp.x.empty()) continue;
        const double mx = mean(grp.x), my = mean(grp.y);
        gx_mean.push_back(mx);
        gy_mean.push_back(my);
        for (std::size_t i = 0; i < grp.x.size(); ++i) {
            dx.push_back(grp.x[i] - mx);
            dy.push_back(grp.y[i] - my);
            owner.push_back(gx_mean.size() - 1);
        }
    }
    require(dx.size() >= 2, ErrorKind::insufficient_data, "pooled fit needs at least two points");
    auto slope_of = [&](const std::vector<double>& yy) {
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < dx.size(); ++i) {
            sxx += dx[i] * dx[i];
            sxy += dx[i] * yy[i];
        }
        require(sxx > 0.0, ErrorKind::precondition, "regressor has zero variance within groups");
        return sxy / sxx;
    };
    LinearFit fit;
    fit.points = dx.size();
    fit.slope = slope_of(dy);
    double icpt = 0.0;
    for (std::size_t g = 0; g < gx_mean.size(); ++g) icpt += gy_mean[g] - fit.slope * gx_mean[g];
    fit.intercept = icpt / static_cast<double>(gx_mean.size());
    double ss_res = 0, ss_tot = 0;
    std::vector<double> resid(dx.size());
    for (std::size_t i = 0; i < dx.size(); ++i) {
        resid[i] = dy[i] - fit.slope * dx[i];
        ss_res += resid[i] * resid[i];
        ss_tot += dy[i] * dy[i];
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    Rng rng(seed);
    std::vector<double> slopes, ystar(dx.size());
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < dx.size(); ++i)
            ystar[i] = fit.slope * dx[i] + resid[rng.below(dx.size())];
        slopes.push_back(slope_of(ystar));
    }
    percentile_interval(std::move(slopes), fit);
    return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::insufficient_data,
            "correlation needs two or more paired values");
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace randdiv
