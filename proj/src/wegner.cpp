#include "randdiv/wegner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "randdiv/error.hpp"
#include "randdiv/spectral.hpp"

namespace randdiv {

// ---------------------------------------------------------------------------
// Smearing

double SmearingFunction::operator()(double x) const {
    const double y = std::clamp((x + epsilon) / (2 * epsilon), 0.0, 1.0);
    return y * y * y * (y * (6 * y - 15) + 10) - 1.0;
}

double SmearingFunction::derivative(double x) const {
    const double y = (x + epsilon) / (2 * epsilon);
    if (y <= 0.0 || y >= 1.0) return 0.0;
    return 30 * y * y * (1 - y) * (1 - y) / (2 * epsilon);
}

SmearingFunction build_smearing(double epsilon) {
    require(epsilon > 0.0, ErrorKind::invalid_parameter, "smearing width must be positive");
    return SmearingFunction{epsilon};
}

SmearReport smear_sandwich_check(const SmearingFunction& rho, double E, double epsilon,
                                 int points) {
    require(epsilon > 0.0, ErrorKind::invalid_parameter, "window half-width must be positive");
    require(points >= 2, ErrorKind::invalid_parameter, "need at least two sample points");
    SmearReport r;
    r.worst_slack = std::numeric_limits<double>::infinity();
    double prev = -std::numeric_limits<double>::infinity();
    const double lo = E - 5 * epsilon, hi = E + 5 * epsilon;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        const double mid = rho(x + 2 * epsilon - E) - rho(x - 2 * epsilon - E);
        const double inner = std::abs(x - E) <= epsilon ? 1.0 : 0.0;
        const double outer = std::abs(x - E) <= 3 * epsilon ? 1.0 : 0.0;
        const double slack = std::min(mid - inner, outer - mid);
        if (slack < r.worst_slack) {
            r.worst_slack = slack;
            r.worst_x = x;
        }
        const double value = rho(x - E);
        if (value < prev) r.monotone = false;
        prev = value;
        r.max_derivative = std::max(r.max_derivative, std::abs(rho.derivative(x - E)));
    }
    r.ok = r.worst_slack >= -1e-12 && r.monotone && r.max_derivative <= 1.0 / rho.epsilon;
    return r;
}

double smeared_trace(const SmearingFunction& rho, std::span<const double> eigenvalues,
                     double shift) {
    double t = 0.0;
    for (double l : eigenvalues) t += rho(l - shift);
    return t;
}

// ---------------------------------------------------------------------------
// Perturbation difference

namespace {

RandomConfig restrict_to(const RandomConfig& cfg, const std::vector<Site>& Q) {
    RandomConfig out;
    out.seed = cfg.seed;
    out.sample_id = cfg.sample_id;
    for (const Site& j : Q) out.values[j] = cfg.at(j);
    return out;
}

template <class F>
void for_each_grid_point(int dim, double L, double res, F&& f) {
    const int m = static_cast<int>(std::lround(L * res));
    std::array<int, kMaxDim> i{};
    while (true) {
        Point x{};
        for (int k = 0; k < dim; ++k) x[k] = -L / 2 + i[k] / res;
        f(x);
        int k = dim - 1;
        while (k >= 0) {
            if (++i[k] <= m) break;
            i[k] = 0;
            --k;
        }
        if (k < 0) return;
    }
}

double mu_tolerance(double mu) { return 1e-15 * std::max(1.0, mu); }

}  // namespace

DifferenceReport difference_bound_check(const ProcessSpec& spec, const RandomConfig& cfg,
                                        double mu, double L, double grid_resolution) {
    require(mu >= 0.0 && mu <= spec.mu_plus() + mu_tolerance(mu), ErrorKind::precondition,
            "shift mu must lie in [0, 1 - omega_plus]");
    require(grid_resolution > 0.0, ErrorKind::invalid_parameter, "grid resolution must be positive");
    const std::vector<Site> Q = active_sites(spec, L);
    const RandomConfig base = restrict_to(cfg, Q);
    const RandomConfig shifted = shift_config(base, mu, Q);

    EquidistributedSequence Z = certificate_centers(spec, base, mu, L);
    if (Z.delta > 0.0) Z.validate();

    DifferenceReport r;
    r.delta = Z.delta;
    r.height = Z.points.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& [j, z] : Z.points) {
        const double s = base.at(j);
        r.height = std::min(r.height, spec.entry_at(j)->certificate.height(s, s + mu));
    }
    double M = 0.0;
    for (const auto& e : spec.families) M = std::max(M, e.M);

    r.upper_slack = std::numeric_limits<double>::infinity();
    r.lower_slack = std::numeric_limits<double>::infinity();
    for_each_grid_point(spec.dim, L, grid_resolution, [&](const Point& x) {
        const double diff = assemble_potential(spec, shifted, x) - assemble_potential(spec, base, x);
        const bool in_S = Z.delta > 0.0 && indicator_union(Z, L, x);
        r.upper_slack = std::min(r.upper_slack, M - diff);
        r.lower_slack = std::min(r.lower_slack, diff - (in_S ? r.height : 0.0));
        ++r.points;
        if (in_S) ++r.covered_points;
    });
    r.ok = r.upper_slack >= -1e-12 && r.lower_slack >= -1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Lifting

namespace {

double eig_tolerance(double lambda) { return 2 * kResidualTolerance * std::max(1.0, std::abs(lambda)); }

std::vector<double> lowest(const DiscreteOperator& H, int k) {
    return eigs_lowest(H, std::min<int>(k, static_cast<int>(H.n))).eigenvalues;
}

}  // namespace

LiftingReport lifting_curve(const ProcessSpec& spec, const FieldSpec& field,
                            const RandomConfig& cfg, double L, double h,
                            const std::vector<double>& mu_values, int n_max, double E_minus,
                            double E_plus) {
    require(n_max >= 1, ErrorKind::invalid_parameter, "n_max must be at least 1");
    require(!mu_values.empty(), ErrorKind::invalid_parameter, "no mu values given");
    for (double mu : mu_values)
        require(mu >= 0.0 && mu <= spec.mu_plus() + mu_tolerance(mu), ErrorKind::precondition,
                "mu = " + std::to_string(mu) + " exceeds mu_plus = " +
                    std::to_string(spec.mu_plus()));
    const Grid grid(spec.dim, L, h);
    const std::vector<Site> Q = active_sites(spec, L);
    const RandomConfig base = restrict_to(cfg, Q);

    const std::vector<double> lam0 = lowest(random_operator(spec, field, base, grid), n_max);

    LiftingReport r;
    r.mu_values = mu_values;
    for (std::size_t n = 0; n < lam0.size(); ++n)
        if (lam0[n] >= E_minus && lam0[n] <= E_plus) {
            r.indices.push_back(static_cast<int>(n + 1));
            r.base.push_back(lam0[n]);
        }
    if (r.indices.empty())
        throw Error(ErrorKind::empty_contributing_set,
                    "no eigenvalue among the lowest " + std::to_string(n_max) + " lies in [" +
                        std::to_string(E_minus) + ", " + std::to_string(E_plus) + "]");

    r.lifts.assign(r.indices.size(), std::vector<double>(mu_values.size(), 0.0));
    for (std::size_t m = 0; m < mu_values.size(); ++m) {
        const RandomConfig shifted = shift_config(base, mu_values[m], Q);
        const std::vector<double> lam = lowest(random_operator(spec, field, shifted, grid), n_max);
        for (std::size_t i = 0; i < r.indices.size(); ++i) {
            const auto n = static_cast<std::size_t>(r.indices[i] - 1);
            r.lifts[i][m] = lam[n] - lam0[n];
        }
    }

    std::vector<std::size_t> order(mu_values.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mu_values[a] < mu_values[b]; });

    r.min_margin = std::numeric_limits<double>::infinity();
    std::vector<Group> groups;
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
        Group g;
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t m : order) {
            const double lift = r.lifts[i][m];
            if (lift < prev - eig_tolerance(r.base[i])) r.monotone_in_mu = false;
            prev = std::max(prev, lift);
            if (mu_values[m] <= 0.0) continue;
            r.min_margin = std::min(r.min_margin, lift);
            if (!(lift > 0.0)) {
                r.all_positive = false;
                continue;
            }
            g.x.push_back(std::log(mu_values[m]));
            g.y.push_back(std::log(lift));
        }
        if (g.x.size() >= 2) groups.push_back(std::move(g));
    }
    if (!groups.empty()) {
        try {
            const LinearFit fit = pooled_fit(groups, 200, 1);
            r.tau_emp = fit.slope;
            r.tau_lo = fit.slope_lo;
            r.tau_hi = fit.slope_hi;
            r.prefactor = std::exp(fit.intercept);
        } catch (const Error&) {
            // fewer than two distinct positive mu values: no exponent
        }
    }
    return r;
}

LiftingProbeReport lifting_lemma_probe(const CoefficientField& B, const EquidistributedSequence& Z,
                                       double eta, const std::vector<double>& delta_values,
                                       const std::vector<double>& t_values, double E_minus,
                                       double E_plus, int n) {
    require(n >= 1 && static_cast<std::size_t>(n) <= B.grid.size(), ErrorKind::invalid_parameter,
            "eigenvalue index out of range");
    require(eta > 0.0, ErrorKind::invalid_parameter, "eta must be positive");
    require(!delta_values.empty() && !t_values.empty(), ErrorKind::invalid_parameter,
            "delta and t lists must be nonempty");
    for (double t : t_values)
        require(t >= 0.0 && t <= 1.0, ErrorKind::invalid_parameter, "t values must lie in [0, 1]");
    const double L = B.grid.L;
    const auto idx = static_cast<std::size_t>(n - 1);

    const double E0 = lowest(assemble_operator(B.grid, B), n)[idx];
    require(E0 >= E_minus && E0 <= E_plus, ErrorKind::precondition,
            "E_n(B) = " + std::to_string(E0) + " lies outside [E_-, E_+]");
    auto lift_for = [&](const CoefficientField::ScalarFn& W) {
        return lowest(assemble_form(B.with_added_potential(W)), n)[idx] - E0;
    };

    LiftingProbeReport r;
    r.delta_values = delta_values;
    r.t_values = t_values;
    r.tolerance = eig_tolerance(E_plus);
    const double tol = r.tolerance;
    auto fail = [&](const std::string& why) {
        if (r.ok) r.failure = why;
        r.ok = false;
    };
    const double t_top = *std::max_element(t_values.begin(), t_values.end());

    for (double delta : delta_values) {
        EquidistributedSequence Zd = Z;
        Zd.delta = delta;
        Zd.validate();
        EquidistributedSequence Zh = Zd;
        Zh.delta = delta / 2;
        auto W = [&](const Point& x) { return indicator_union(Zd, L, x) ? eta * delta : 0.0; };

        const double full = lift_for(W);
        require(E0 + full <= E_plus, ErrorKind::precondition,
                "E_n(B + W) = " + std::to_string(E0 + full) + " exceeds E_+");

        std::vector<double> row(t_values.size());
        for (std::size_t i = 0; i < t_values.size(); ++i) {
            const double t = t_values[i];
            row[i] = t == 1.0 ? full : lift_for([&](const Point& x) { return t * W(x); });
        }
        std::vector<std::size_t> order(t_values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return t_values[a] < t_values[b]; });
        double prev = -std::numeric_limits<double>::infinity();
        const double top = row[order.back()];
        for (std::size_t i : order) {
            if (row[i] < -tol) fail("negative lift at t = " + std::to_string(t_values[i]));
            if (row[i] < prev - tol) fail("lift decreases at t = " + std::to_string(t_values[i]));
            prev = std::max(prev, row[i]);
            if (t_top > 0.0 && row[i] < t_values[i] / t_top * top - tol) r.linear_bound = false;
        }
        r.lifts.push_back(std::move(row));

        const double with_minorant =
            lift_for([&](const Point& x) { return lipschitz_minorant(Zd, eta, L, x); });
        const double with_half =
            lift_for([&](const Point& x) { return indicator_union(Zh, L, x) ? eta * delta : 0.0; });
        r.lift_W.push_back(full);
        r.lift_minorant.push_back(with_minorant);
        r.lift_half.push_back(with_half);
        if (full < with_minorant - tol || with_minorant < with_half - tol)
            fail("minorant ordering violated at delta = " + std::to_string(delta));
    }

    std::vector<double> dx, ly;
    for (std::size_t i = 0; i < delta_values.size(); ++i)
        if (r.lift_W[i] > 0.0) {
            dx.push_back(delta_values[i]);
            ly.push_back(r.lift_W[i]);
        }
    try {
        const LinearFit fit = loglog_fit(dx, ly, 0);
        r.delta_exponent = fit.slope;
        r.implied_N = fit.slope / (1.0 + std::pow(E_plus, 2.0 / 3.0));
    } catch (const Error&) {
        // a single delta (or all-equal deltas) has no exponent
    }
    return r;
}

EpsilonPrime epsilon_prime(double epsilon, double tau, double mu_prime) {
    require(epsilon > 0.0 && tau > 0.0, ErrorKind::invalid_parameter,
            "epsilon and tau must be positive");
    require(mu_prime > 0.0 && mu_prime <= 1.0, ErrorKind::invalid_parameter,
            "mu' must lie in (0, 1]");
    EpsilonPrime e;
    e.eps_tilde = std::pow(mu_prime, tau) / 4;
    require(epsilon <= e.eps_tilde * (1 + 1e-12), ErrorKind::range_error,
            "epsilon = " + std::to_string(epsilon) + " exceeds (mu')^tau / 4 = " +
                std::to_string(e.eps_tilde));
    e.eps_prime = std::min(std::pow(4 * epsilon, 1.0 / tau), mu_prime);
    return e;
}

// ---------------------------------------------------------------------------
// Interpolation chain

RandomConfig InterpolationChain::at(std::size_t l, double s) const {
    require(l >= 1 && l <= enumeration.size(), ErrorKind::invalid_parameter,
            "chain step out of range");
    RandomConfig nu = omega;
    for (std::size_t i = 0; i + 1 < l; ++i) nu.values[enumeration[i]] = omega.at(enumeration[i]) + mu;
    nu.values[enumeration[l - 1]] = s;
    return nu;
}

InterpolationChain interpolation_chain(const std::vector<Site>& Q_enumeration,
                                       const RandomConfig& omega, double mu) {
    require(mu >= 0.0, ErrorKind::range_error, "chain shift must be nonnegative");
    for (const Site& j : Q_enumeration)
        require(omega.at(j) + mu <= 1.0 + 1e-15, ErrorKind::range_error,
                "chain shift moves omega past 1");
    return InterpolationChain{Q_enumeration, omega, mu};
}

TelescopeReport telescope_check(const ProcessSpec& spec, const FieldSpec& field,
                                const RandomConfig& cfg, double mu, double E, double epsilon,
                                double L, double h) {
    const Grid grid(spec.dim, L, h);
    const std::vector<Site> Q = active_sites(spec, L);
    const RandomConfig base = restrict_to(cfg, Q);
    const InterpolationChain chain = interpolation_chain(Q, base, mu);
    const SmearingFunction rho = build_smearing(epsilon);
    const double shift = E + 2 * epsilon;
    auto Phi = [&](const RandomConfig& c) {
        return smeared_trace(rho, all_eigenvalues(random_operator(spec, field, c, grid)), shift);
    };

    TelescopeReport r;
    r.steps = chain.steps();
    r.direct = Phi(shift_config(base, mu, Q)) - Phi(base);
    for (std::size_t l = 1; l <= chain.steps(); ++l) {
        const double w = base.at(Q[l - 1]);
        r.terms.push_back(Phi(chain.at(l, w + mu)) - Phi(chain.at(l, w)));
        r.chain_sum += r.terms.back();
    }
    r.slack = r.chain_sum - r.direct;
    r.ok = r.slack >= -1e-9;
    return r;
}

// ---------------------------------------------------------------------------
// Spectral-shift integral

ShiftIntegralReport shift_integral_check(const std::function<double(double)>& Phi,
                                         const std::vector<double>& phi_breaks,
                                         const Density& kappa, double gamma) {
    require(gamma > 0.0, ErrorKind::invalid_parameter, "gamma must be positive");
    const double lo = kappa.lo(), hi = kappa.hi();

    const int probes = 2048;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= probes; ++i) {
        const double x = lo - 1.0 + (hi + gamma + 2.0 - lo) * i / probes;
        const double v = Phi(x);
        require(v <= 0.0 && v >= prev, ErrorKind::precondition,
                "Phi must be nonpositive and nondecreasing");
        prev = v;
    }

    std::vector<double> cuts{lo, hi};
    auto add = [&](double c) {
        if (c > lo && c < hi) cuts.push_back(c);
    };
    for (double b : kappa.breakpoints()) add(b);
    for (double b : phi_breaks) {
        add(b);
        add(b - gamma);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto f = [&](double l) { return (Phi(l + gamma) - Phi(l)) * kappa.pdf(l); };
    ShiftIntegralReport r;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        r.lhs += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, cuts[i], cuts[i + 1], 15, 1e-14, &err);
        r.error_estimate += err;
    }
    if (!(r.error_estimate < 1e-8))
        throw Error(ErrorKind::solver_failure,
                    "quadrature did not converge (error estimate " +
                        std::to_string(r.error_estimate) + ")");
    r.rhs = -gamma * kappa.sup() * Phi(lo);
    r.ok = r.lhs <= r.rhs + 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo

void check_wegner_setup(const ProcessSpec& spec, const WegnerSetup& setup) {
    std::vector<std::string> problems;
    if (setup.samples == 0) problems.push_back("samples must be positive");
    if (setup.L_values.empty()) problems.push_back("no L values");
    if (setup.epsilon_values.empty()) problems.push_back("no epsilon values");
    if (!(setup.E_minus > 0.0)) problems.push_back("E_minus must be positive");
    for (double L : setup.L_values) {
        try {
            (void)active_sites(spec, L);
            (void)Grid(spec.dim, L, setup.h);
        } catch (const Error& e) {
            problems.push_back("L=" + std::to_string(L) + ": " + e.what());
        }
    }
    for (double eps : setup.epsilon_values) {
        if (!(eps > 0.0)) {
            problems.push_back("eps=" + std::to_string(eps) + ": must be positive");
            continue;
        }
        if (setup.E - 3 * eps < setup.E_minus || setup.E + 3 * eps > setup.E_plus) {
            std::ostringstream os;
            os << "eps=" << eps << ": [E-3eps, E+3eps] = [" << setup.E - 3 * eps << ", "
               << setup.E + 3 * eps << "] not inside [" << setup.E_minus << ", " << setup.E_plus
               << "]";
            problems.push_back(os.str());
        }
    }
    if (!problems.empty()) {
        std::string msg = "wegner setup rejected:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw Error(ErrorKind::precondition, msg);
    }
}

namespace {

// Sorted eigenvalues covering everything up to `top`.
std::vector<double> eigenvalues_through(const DiscreteOperator& H, double top) {
    if (H.grid.dim == 1 || H.n <= 64) {
        std::vector<double> all = all_eigenvalues(H);
        if (all.back() < top)
            throw Error(ErrorKind::spectrum_exhausted, "window exceeds the discrete spectrum");
        return all;
    }
    std::size_t k = std::min<std::size_t>(H.n, 16);
    while (true) {
        SpectrumSlice s = eigs_lowest(H, static_cast<int>(k));
        if (s.eigenvalues.back() > top) return s.eigenvalues;
        if (k == H.n)
            throw Error(ErrorKind::spectrum_exhausted, "window exceeds the discrete spectrum");
        k = std::min(H.n, 2 * k);
    }
}

}  // namespace

WegnerResult wegner_monte_carlo(const ProcessSpec& spec, const FieldSpec& field,
                                const WegnerSetup& setup, Exec exec) {
    check_wegner_setup(spec, setup);
    const std::size_t ne = setup.epsilon_values.size();
    const double eps_max =
        *std::max_element(setup.epsilon_values.begin(), setup.epsilon_values.end());

    WegnerResult res;
    res.seed = setup.seed;
    res.samples = setup.samples;
    for (double L : setup.L_values) {
        const Grid grid(spec.dim, L, setup.h);
        const std::vector<Site> Q = active_sites(spec, L);
        std::vector<std::vector<int>> counts(setup.samples, std::vector<int>(ne, 0));
        std::vector<std::exception_ptr> errors(setup.samples);
        kernels::for_each_index(setup.samples, exec, [&](std::size_t s) {
            try {
                const RandomConfig cfg = sample_config(spec, setup.seed, s, Q);
                const DiscreteOperator H = random_operator(spec, field, cfg, grid, Exec::serial);
                const std::vector<double> eig = eigenvalues_through(H, setup.E + eps_max);
                for (std::size_t e = 0; e < ne; ++e)
                    counts[s][e] = count_in_window(eig, setup.E, setup.epsilon_values[e]);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);

        for (std::size_t e = 0; e < ne; ++e) {
            double sum = 0.0;
            for (std::size_t s = 0; s < setup.samples; ++s) sum += counts[s][e];
            const double n = static_cast<double>(setup.samples);
            const double mean = sum / n;
            double ss = 0.0;
            for (std::size_t s = 0; s < setup.samples; ++s)
                ss += (counts[s][e] - mean) * (counts[s][e] - mean);
            WegnerCell c;
            c.epsilon = setup.epsilon_values[e];
            c.L = L;
            c.mean = mean;
            c.stderr_ = setup.samples > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0;
            c.samples = setup.samples;
            res.cells.push_back(c);
        }
        res.counts.push_back(std::move(counts));
    }

    const std::size_t nL = setup.L_values.size();
    auto cell = [&](std::size_t li, std::size_t e) -> const WegnerCell& {
        return res.cells[li * ne + e];
    };

    std::vector<std::size_t> eorder(ne);
    for (std::size_t e = 0; e < ne; ++e) eorder[e] = e;
    std::stable_sort(eorder.begin(), eorder.end(), [&](std::size_t a, std::size_t b) {
        return setup.epsilon_values[a] < setup.epsilon_values[b];
    });
    for (std::size_t li = 0; li < nL; ++li)
        for (std::size_t i = 1; i < ne; ++i)
            if (cell(li, eorder[i]).mean < cell(li, eorder[i - 1]).mean) res.eps_monotone = false;

    std::vector<Group> groups;
    bool all_fit = true;
    for (std::size_t li = 0; li < nL; ++li) {
        std::vector<double> x, y;
        for (std::size_t e = 0; e < ne; ++e) {
            x.push_back(setup.epsilon_values[e]);
            y.push_back(cell(li, e).mean);
        }
        try {
            res.eps_fits.push_back(loglog_fit(x, y, setup.bootstrap, setup.seed ^ (0x100 + li)));
            Group g;
            for (std::size_t e = 0; e < ne; ++e) {
                g.x.push_back(std::log(x[e]));
                g.y.push_back(std::log(y[e]));
            }
            groups.push_back(std::move(g));
        } catch (const Error&) {
            res.eps_fits.push_back(LinearFit{});
            all_fit = false;
        }
    }
    if (all_fit && !groups.empty()) {
        try {
            res.eps_pooled = pooled_fit(groups, setup.bootstrap, setup.seed ^ 0x200);
            res.eps_fit_available = true;
        } catch (const Error&) {
        }
    }

    bool all_L = nL >= 2;
    res.L_exponent = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < ne && nL >= 2; ++e) {
        std::vector<double> x, y;
        for (std::size_t li = 0; li < nL; ++li) {
            x.push_back(setup.L_values[li]);
            y.push_back(cell(li, e).mean);
        }
        try {
            res.L_fits.push_back(loglog_fit(x, y, setup.bootstrap, setup.seed ^ (0x300 + e)));
            res.L_exponent = std::max(res.L_exponent, res.L_fits.back().slope);
        } catch (const Error&) {
            res.L_fits.push_back(LinearFit{});
            all_L = false;
        }
    }
    res.L_fit_available = all_L;
    if (!all_L) res.L_exponent = 0.0;
    return res;
}

TauRemarkReport tau_remark_probe(const std::vector<double>& E_minus_values,
                                 const std::vector<double>& E_plus_values,
                                 const std::vector<double>& fitted_taus) {
    require(E_minus_values.size() == E_plus_values.size() &&
                E_plus_values.size() == fitted_taus.size(),
            ErrorKind::dimension_mismatch, "window and tau lists differ in length");
    require(fitted_taus.size() >= 3, ErrorKind::insufficient_data,
            "tau probe needs at least three windows");
    TauRemarkReport r;
    for (std::size_t i = 0; i < fitted_taus.size(); ++i) {
        require(E_minus_values[i] > 0.0 && E_plus_values[i] > E_minus_values[i],
                ErrorKind::invalid_parameter, "energy windows need 0 < E_- < E_+");
        r.regressor.push_back(1.0 + std::pow(E_plus_values[i], 2.0 / 3.0) +
                              std::abs(std::log(E_minus_values[i])));
    }
    const auto [mn, mx] = std::minmax_element(r.regressor.begin(), r.regressor.end());
    if (*mx - *mn <= 1e-12 * std::max(1.0, std::abs(*mx))) {
        r.degenerate = true;
        return r;
    }
    const LinearFit fit = ols(r.regressor, fitted_taus);
    r.slope = fit.slope;
    r.intercept = fit.intercept;
    r.correlation = pearson(r.regressor, fitted_taus);
    return r;
}

EnergyWindow default_energy_window(const Grid& grid, double theta_E, int count) {
    require(theta_E >= 1.0, ErrorKind::invalid_parameter, "theta_E must be at least 1");
    require(count >= 1 && static_cast<std::size_t>(count) <= grid.size(),
            ErrorKind::invalid_parameter, "count out of range");
    const int m = grid.interior_per_axis();
    std::vector<double> axis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        axis[static_cast<std::size_t>(i)] =
            2.0 / (grid.h * grid.h) * (1.0 - std::cos(std::numbers::pi * (i + 1) * grid.h / grid.L));
    std::vector<double> values{0.0};
    for (int k = 0; k < grid.dim; ++k) {
        std::vector<double> next;
        next.reserve(values.size() * axis.size());
        for (double v : values)
            for (double a : axis) next.push_back(v + a);
        values = std::move(next);
    }
    std::nth_element(values.begin(), values.begin() + (count - 1), values.end());
    const double lam_count = values[static_cast<std::size_t>(count - 1)];
    const double lam_1 = grid.dim * axis[0];
    return {0.5 * lam_1 / theta_E, theta_E * lam_count};
}

}  // namespace randdiv
