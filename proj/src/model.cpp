#include "randdiv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "randdiv/error.hpp"
#include "randdiv/rng.hpp"

namespace randdiv {

const char* to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::alloy: return "alloy";
        case FamilyKind::breather: return "breather";
        case FamilyKind::tabulated: return "tabulated";
    }
    return "?";
}

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "alloy") return FamilyKind::alloy;
    if (s == "breather") return FamilyKind::breather;
    if (s == "tabulated") return FamilyKind::tabulated;
    throw Error(ErrorKind::parse_error, "unknown family kind '" + s + "'");
}

const char* to_string(CenterRule rule) {
    switch (rule) {
        case CenterRule::site_center: return "site_center";
        case CenterRule::breather_outer: return "breather_outer";
        case CenterRule::breather_inner: return "breather_inner";
    }
    return "?";
}

CenterRule center_rule_from_string(const std::string& s) {
    if (s == "site_center") return CenterRule::site_center;
    if (s == "breather_outer") return CenterRule::breather_outer;
    if (s == "breather_inner") return CenterRule::breather_inner;
    throw Error(ErrorKind::parse_error, "unknown center rule '" + s + "'");
}

// ---------------------------------------------------------------------------
// Tabulated families

namespace {

// Locates x in sorted nodes; returns segment index and local weight.
bool locate(const std::vector<double>& nodes, double x, std::size_t& i, double& w) {
    if (x < nodes.front() || x > nodes.back()) return false;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    i = i == 0 ? 0 : i - 1;
    if (i + 1 >= nodes.size()) i = nodes.size() - 2;
    w = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return true;
}

}  // namespace

void FamilyTable::validate(int dim) const {
    require(t_nodes.size() >= 2 && y_nodes.size() >= 2, ErrorKind::invalid_parameter,
            "family table needs at least two nodes per axis");
    require(std::is_sorted(t_nodes.begin(), t_nodes.end()) &&
                std::is_sorted(y_nodes.begin(), y_nodes.end()),
            ErrorKind::invalid_parameter, "family table nodes must be increasing");
    require(t_nodes.front() <= 0.0 && t_nodes.back() >= 1.0, ErrorKind::invalid_parameter,
            "family table t-nodes must cover [0, 1]");
    std::size_t expected = t_nodes.size();
    for (int k = 0; k < dim; ++k) expected *= y_nodes.size();
    require(values.size() == expected, ErrorKind::invalid_parameter,
            "family table has " + std::to_string(values.size()) + " values, expected " +
                std::to_string(expected));
}

double FamilyTable::interpolate(double t, const Point& y, int dim) const {
    std::size_t it;
    double wt;
    if (!locate(t_nodes, t, it, wt)) return 0.0;
    std::array<std::size_t, kMaxDim> iy{};
    std::array<double, kMaxDim> wy{};
    for (int k = 0; k < dim; ++k)
        if (!locate(y_nodes, y[k], iy[k], wy[k])) return 0.0;

    const std::size_t ny = y_nodes.size();
    double acc = 0.0;
    const int corners = 1 << (dim + 1);
    for (int c = 0; c < corners; ++c) {
        double weight = (c & 1) ? wt : 1.0 - wt;
        std::size_t index = it + (c & 1);
        for (int k = 0; k < dim; ++k) {
            const int bit = (c >> (k + 1)) & 1;
            weight *= bit ? wy[k] : 1.0 - wy[k];
            index = index * ny + iy[k] + bit;
        }
        if (weight != 0.0) acc += weight * values[index];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Single-site families

double SingleSiteFamily::support_reach() const {
    if (kind == FamilyKind::tabulated && table)
        return std::max(std::abs(table->y_nodes.front()), std::abs(table->y_nodes.back()));
    return r;
}

double hat_profile(double r, double radius) { return std::max(0.0, 1.0 - radius / r); }

double hat_bump(double r, const Point& x) {
    require(r > 0.0 && r <= 1.0, ErrorKind::invalid_parameter,
            "hat radius must lie in (0, 1], got " + std::to_string(r));
    return hat_profile(r, norm(x));
}

double evaluate_family(const SingleSiteFamily& f, double t, const Point& x) {
    const Point y = x - f.center();
    switch (f.kind) {
        case FamilyKind::alloy: return t * hat_profile(f.r, norm(y));
        case FamilyKind::breather: return t > 0.0 ? hat_profile(f.r * t, norm(y)) : 0.0;
        case FamilyKind::tabulated: return f.table ? f.table->interpolate(t, y, f.dim) : 0.0;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Certificates

Point MonotonicityCertificate::center(double s, double t, const SingleSiteFamily& f) const {
    Point x0 = f.center();
    switch (rule) {
        case CenterRule::site_center: break;
        case CenterRule::breather_outer: x0[0] += f.r * (s + (t - s) / 4); break;
        case CenterRule::breather_inner: x0[0] += f.r * (s * t / 2 + (t - s) / 4); break;
    }
    return x0;
}

double MonotonicityCertificate::radius(double s, double t) const {
    return beta * std::pow(t - s, q);
}

double MonotonicityCertificate::height(double s, double t) const {
    return alpha * std::pow(t - s, p);
}

// ---------------------------------------------------------------------------
// Densities

Density Density::uniform(double lo, double hi) {
    require(lo < hi, ErrorKind::invalid_parameter, "density support must satisfy lo < hi");
    Density d;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

Density Density::table(double lo, double hi, std::vector<double> node_values) {
    require(lo < hi, ErrorKind::invalid_parameter, "density support must satisfy lo < hi");
    require(node_values.size() >= 2, ErrorKind::invalid_parameter,
            "density table needs at least two nodes");
    for (double v : node_values)
        require(v >= 0.0 && std::isfinite(v), ErrorKind::invalid_parameter,
                "density table values must be finite and nonnegative");
    Density d;
    d.lo_ = lo;
    d.hi_ = hi;
    d.nodes_ = std::move(node_values);
    const double w = (hi - lo) / static_cast<double>(d.nodes_.size() - 1);
    d.segment_mass_.resize(d.nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < d.nodes_.size(); ++i)
        d.segment_mass_[i] = w * (d.nodes_[i] + d.nodes_[i + 1]) / 2;
    return d;
}

double Density::pdf(double x) const {
    if (x < lo_ || x > hi_) return 0.0;
    if (is_uniform()) return 1.0 / (hi_ - lo_);
    const double w = (hi_ - lo_) / static_cast<double>(nodes_.size() - 1);
    auto i = static_cast<std::size_t>((x - lo_) / w);
    i = std::min(i, nodes_.size() - 2);
    const double a = (x - lo_) / w - static_cast<double>(i);
    return nodes_[i] * (1 - a) + nodes_[i + 1] * a;
}

double Density::cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return integral();
    if (is_uniform()) return (x - lo_) / (hi_ - lo_);
    const double w = (hi_ - lo_) / static_cast<double>(nodes_.size() - 1);
    auto i = static_cast<std::size_t>((x - lo_) / w);
    i = std::min(i, nodes_.size() - 2);
    double acc = 0.0;
    for (std::size_t k = 0; k < i; ++k) acc += segment_mass_[k];
    const double tau = x - lo_ - static_cast<double>(i) * w;
    const double a = nodes_[i], b = nodes_[i + 1];
    return acc + a * tau + (b - a) * tau * tau / (2 * w);
}

double Density::inverse_cdf(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    if (is_uniform()) return std::min(hi_, lo_ + u * (hi_ - lo_));
    const double total = integral();
    double target = u * total;
    const double w = (hi_ - lo_) / static_cast<double>(nodes_.size() - 1);
    std::size_t i = 0;
    for (; i + 1 < segment_mass_.size(); ++i) {
        if (target < segment_mass_[i]) break;
        target -= segment_mass_[i];
    }
    // Skip trailing zero-mass segments chosen by roundoff.
    while (segment_mass_[i] == 0.0 && i > 0) --i;
    const double a = nodes_[i], b = nodes_[i + 1];
    target = std::clamp(target, 0.0, segment_mass_[i]);
    // Solve a*tau + (b-a)*tau^2/(2w) = target in the stable form.
    const double disc = a * a + 2 * (b - a) * target / w;
    const double denom = a + std::sqrt(std::max(0.0, disc));
    double tau = denom > 0.0 ? 2 * target / denom : w;
    tau = std::clamp(tau, 0.0, w);
    return std::clamp(lo_ + static_cast<double>(i) * w + tau, lo_, hi_);
}

double Density::sup() const {
    if (is_uniform()) return 1.0 / (hi_ - lo_);
    return *std::max_element(nodes_.begin(), nodes_.end());
}

double Density::integral() const {
    if (is_uniform()) return 1.0;
    double acc = 0.0;
    for (double m : segment_mass_) acc += m;
    return acc;
}

std::vector<double> Density::breakpoints() const {
    std::vector<double> out;
    if (is_uniform()) return out;
    const double w = (hi_ - lo_) / static_cast<double>(nodes_.size() - 1);
    for (std::size_t i = 1; i + 1 < nodes_.size(); ++i)
        out.push_back(lo_ + static_cast<double>(i) * w);
    return out;
}

// ---------------------------------------------------------------------------
// Process definition

bool SiteRange::contains(const Site& j, int dim) const {
    for (int k = 0; k < dim; ++k)
        if (j[k] < lo[k] || j[k] > hi[k]) return false;
    return true;
}

void ProcessSpec::validate() const {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::invalid_parameter,
            "dimension must be 1, 2 or 3");
    require(G > 0.0, ErrorKind::invalid_parameter, "G must be positive");
    require(omega_minus >= 0.0 && omega_minus < omega_plus && omega_plus < 1.0,
            ErrorKind::invalid_parameter, "need 0 <= omega_minus < omega_plus < 1");
    require(std::abs(density.lo() - omega_minus) < 1e-14 &&
                std::abs(density.hi() - omega_plus) < 1e-14,
            ErrorKind::invalid_parameter, "density support must be [omega_minus, omega_plus]");
    require(std::abs(density.integral() - 1.0) <= 1e-8, ErrorKind::invalid_parameter,
            "density integrates to " + std::to_string(density.integral()) + ", not 1");
    require(density.sup() <= J * (1 + 1e-12), ErrorKind::invalid_parameter,
            "density sup " + std::to_string(density.sup()) + " exceeds J = " + std::to_string(J));
    for (const auto& e : families) {
        require(e.M >= 0.0 && e.K >= 0.0, ErrorKind::invalid_parameter,
                "family '" + e.name + "': M and K must be nonnegative");
        if (e.kind == FamilyKind::tabulated) {
            require(e.table != nullptr, ErrorKind::invalid_parameter,
                    "family '" + e.name + "': tabulated family without table");
            e.table->validate(dim);
        } else {
            require(e.r > 0.0 && e.r <= 1.0, ErrorKind::invalid_parameter,
                    "family '" + e.name + "': hat radius must lie in (0, 1]");
        }
        if (e.kind == FamilyKind::breather)
            require(omega_minus > 0.0, ErrorKind::invalid_parameter,
                    "family '" + e.name + "': breather families need omega_minus > 0");
        const auto& c = e.certificate;
        require(c.alpha > 0.0 && c.beta > 0.0 && c.p >= 0.0 && c.q >= 0.0,
                ErrorKind::invalid_parameter,
                "family '" + e.name + "': certificate needs alpha, beta > 0 and p, q >= 0");
    }
}

const FamilyEntry* ProcessSpec::entry_at(const Site& j) const {
    for (const auto& e : families)
        if (!e.sites || e.sites->contains(j, dim)) return &e;
    return nullptr;
}

std::optional<SingleSiteFamily> ProcessSpec::family_at(const Site& j) const {
    const FamilyEntry* e = entry_at(j);
    if (!e) return std::nullopt;
    SingleSiteFamily f;
    f.site = j;
    f.dim = dim;
    f.kind = e->kind;
    f.r = e->r;
    f.G = G;
    f.M = e->M;
    f.K = e->K;
    f.table = e->table;
    return f;
}

double ProcessSpec::reach() const {
    double reach = 0.0;
    for (const auto& e : families) {
        if (e.kind == FamilyKind::tabulated && e.table)
            reach = std::max({reach, std::abs(e.table->y_nodes.front()),
                              std::abs(e.table->y_nodes.back())});
        else
            reach = std::max(reach, e.r);
    }
    return reach;
}

double RandomConfig::at(const Site& j) const {
    auto it = values.find(j);
    require(it != values.end(), ErrorKind::data_error, "config has no value for site");
    return it->second;
}

void EquidistributedSequence::validate() const {
    require(delta > 0.0 && delta < G / 2, ErrorKind::invalid_parameter,
            "equidistributed sequence needs delta in (0, G/2)");
    for (const auto& [j, z] : points)
        require(ball_in_box(z, delta, site_center(j, G, dim), G, dim),
                ErrorKind::certificate_geometry,
                "ball around " + to_string(z, dim) + " leaves the box of site " +
                    to_string(j, dim));
}

// ---------------------------------------------------------------------------
// Potentials and sites

namespace {

template <class F>
void for_each_site_in(const Site& lo, const Site& hi, int dim, F&& f) {
    Site j = lo;
    for (int k = dim; k < kMaxDim; ++k) j[k] = 0;
    while (true) {
        f(j);
        int k = dim - 1;
        while (k >= 0) {
            if (++j[k] <= hi[k]) break;
            j[k] = lo[k];
            --k;
        }
        if (k < 0) return;
    }
}

bool is_multiple(double L, double G) {
    const double ratio = L / G;
    return L > 0.0 && std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1;
}

}  // namespace

double assemble_potential(const ProcessSpec& spec, const RandomConfig& cfg, const Point& x) {
    const double R = spec.reach();
    if (R <= 0.0) return 0.0;
    Site lo{}, hi{};
    for (int k = 0; k < spec.dim; ++k) {
        lo[k] = static_cast<int>(std::floor((x[k] - R) / spec.G)) - 1;
        hi[k] = static_cast<int>(std::ceil((x[k] + R) / spec.G)) + 1;
    }
    double v = 0.0;
    for_each_site_in(lo, hi, spec.dim, [&](const Site& j) {
        auto it = cfg.values.find(j);
        if (it == cfg.values.end()) return;
        const FamilyEntry* e = spec.entry_at(j);
        if (!e) return;
        SingleSiteFamily f;
        f.site = j;
        f.dim = spec.dim;
        f.kind = e->kind;
        f.r = e->r;
        f.G = spec.G;
        f.table = e->table;
        v += evaluate_family(f, it->second, x);
    });
    return v;
}

std::vector<Site> active_sites(const ProcessSpec& spec, double L) {
    require(is_multiple(L, spec.G), ErrorKind::invalid_parameter,
            "L = " + std::to_string(L) + " is not a positive multiple of G");
    const double R = std::max(spec.G / 2, spec.reach());
    const int m = static_cast<int>(std::ceil((L / 2 + R) / spec.G)) + 1;
    Site lo{}, hi{};
    for (int k = 0; k < spec.dim; ++k) {
        lo[k] = -m;
        hi[k] = m;
    }
    std::vector<Site> out;
    for_each_site_in(lo, hi, spec.dim, [&](const Site& j) {
        if (!spec.entry_at(j)) return;
        for (int k = 0; k < spec.dim; ++k)
            if (!(std::abs(spec.G * j[k]) < L / 2 + R - 1e-12)) return;
        out.push_back(j);
    });
    return out;
}

std::vector<Site> interior_sites(const ProcessSpec& spec, double L) {
    require(is_multiple(L, spec.G), ErrorKind::invalid_parameter,
            "L = " + std::to_string(L) + " is not a positive multiple of G");
    const int m = static_cast<int>(std::ceil(L / spec.G)) + 1;
    Site lo{}, hi{};
    for (int k = 0; k < spec.dim; ++k) {
        lo[k] = -m;
        hi[k] = m;
    }
    std::vector<Site> out;
    for_each_site_in(lo, hi, spec.dim, [&](const Site& j) {
        for (int k = 0; k < spec.dim; ++k)
            if (std::abs(spec.G * j[k]) + spec.G / 2 > L / 2 + 1e-12) return;
        out.push_back(j);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Family verification

SupportReport verify_support_bound(const SingleSiteFamily& f, double grid_resolution,
                                   double t_step) {
    require(grid_resolution > 0.0 && t_step > 0.0, ErrorKind::invalid_parameter,
            "grid resolution and t step must be positive");
    const double step = 1.0 / grid_resolution;
    const int half = static_cast<int>(std::ceil(f.G * grid_resolution));
    const Point c = f.center();
    SupportReport report;
    const int nt = static_cast<int>(std::round(1.0 / t_step));
    Site lo{}, hi{};
    for (int k = 0; k < f.dim; ++k) {
        lo[k] = -half;
        hi[k] = half;
    }
    for (int it = 0; it <= nt; ++it) {
        const double t = std::min(1.0, it * t_step);
        for_each_site_in(lo, hi, f.dim, [&](const Site& offs) {
            Point x = c;
            for (int k = 0; k < f.dim; ++k) x[k] += offs[k] * step;
            const double u = evaluate_family(f, t, x);
            double violation;
            if (in_open_box(x, c, f.G, f.dim))
                violation = std::max({-u, u - f.M, 0.0});
            else
                violation = std::abs(u);
            report.max_violation = std::max(report.max_violation, violation);
        });
    }
    report.ok = report.max_violation <= 1e-12;
    return report;
}

CertificateReport verify_certificate(const SingleSiteFamily& f, const MonotonicityCertificate& c,
                                     const std::vector<std::pair<double, double>>& pairs,
                                     double grid_resolution, double tolerance) {
    CertificateReport report;
    report.margin = std::numeric_limits<double>::infinity();
    for (const auto& [s, t] : pairs) {
        require(0.0 <= s && s < t && t <= 1.0, ErrorKind::precondition,
                "certificate pairs need 0 <= s < t <= 1");
        const Point x0 = c.center(s, t, f);
        const double rad = c.radius(s, t);
        if (!ball_in_box(x0, rad, f.center(), f.G, f.dim))
            throw Error(ErrorKind::certificate_geometry,
                        "ball B(" + to_string(x0, f.dim) + ", " + std::to_string(rad) +
                            ") leaves the box of site " + to_string(f.site, f.dim));
        const double bound = c.height(s, t);
        const double step = std::min(1.0 / grid_resolution, rad / 8);
        const int m = static_cast<int>(std::ceil(rad / step));
        Site lo{}, hi{};
        for (int k = 0; k < f.dim; ++k) {
            lo[k] = -m;
            hi[k] = m;
        }
        double pair_margin = std::numeric_limits<double>::infinity();
        for_each_site_in(lo, hi, f.dim, [&](const Site& offs) {
            Point x = x0;
            for (int k = 0; k < f.dim; ++k) x[k] += offs[k] * step;
            if (!(distance(x, x0) < rad)) return;
            const double diff = evaluate_family(f, t, x) - evaluate_family(f, s, x);
            pair_margin = std::min(pair_margin, diff - bound);
        });
        if (pair_margin < report.margin) {
            report.margin = pair_margin;
            report.worst_pair = {s, t};
        }
    }
    report.ok = report.margin >= -tolerance;
    return report;
}

double estimate_lipschitz(const SingleSiteFamily& f, const std::vector<double>& t_values,
                          double grid_resolution) {
    if (f.kind == FamilyKind::breather)
        for (double t : t_values)
            require(t > 0.0, ErrorKind::invalid_parameter,
                    "breather families are not Lipschitz at t = 0 (need omega_minus > 0)");
    const double step = 1.0 / grid_resolution;
    const int half = static_cast<int>(std::ceil(f.support_reach() * grid_resolution)) + 1;
    const Point c = f.center();
    Site lo{}, hi{};
    for (int k = 0; k < f.dim; ++k) {
        lo[k] = -half;
        hi[k] = half - 1;
    }
    double best = 0.0;
    for (double t : t_values) {
        for_each_site_in(lo, hi, f.dim, [&](const Site& offs) {
            Point x = c;
            for (int k = 0; k < f.dim; ++k) x[k] += offs[k] * step;
            const double ux = evaluate_family(f, t, x);
            for (int k = 0; k < f.dim; ++k) {
                Point y = x;
                y[k] += step;
                best = std::max(best, std::abs(evaluate_family(f, t, y) - ux) / step);
            }
        });
    }
    return best;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t site_seed(std::uint64_t seed, std::uint64_t sample_id, const Site& j) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ sample_id);
    for (int k = 0; k < kMaxDim; ++k)
        h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(j[k])));
    return h;
}

RandomConfig sample_config(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t sample_id,
                           const std::vector<Site>& sites) {
    RandomConfig cfg;
    cfg.seed = seed;
    cfg.sample_id = sample_id;
    for (const Site& j : sites) {
        const double u = uniform01(site_seed(seed, sample_id, j));
        cfg.values[j] = std::clamp(spec.density.inverse_cdf(u), spec.omega_minus, spec.omega_plus);
    }
    return cfg;
}

RandomConfig shift_config(const RandomConfig& cfg, double mu, const std::vector<Site>& Q) {
    require(mu >= 0.0, ErrorKind::range_error, "shift must be nonnegative");
    RandomConfig out = cfg;
    for (const Site& j : Q) {
        auto it = out.values.find(j);
        require(it != out.values.end(), ErrorKind::data_error, "shift site missing from config");
        const double shifted = it->second + mu;
        require(shifted <= 1.0 + 1e-15, ErrorKind::range_error,
                "shift moves omega past 1 (" + std::to_string(shifted) + ")");
        it->second = shifted;
    }
    return out;
}

EquidistributedSequence certificate_centers(const ProcessSpec& spec, const RandomConfig& cfg,
                                            double mu, double L) {
    EquidistributedSequence Z;
    Z.dim = spec.dim;
    Z.G = spec.G;
    Z.delta = std::numeric_limits<double>::infinity();
    for (const Site& j : interior_sites(spec, L)) {
        const FamilyEntry* e = spec.entry_at(j);
        if (!e || !cfg.contains(j)) continue;
        auto f = spec.family_at(j);
        const double s = cfg.at(j);
        const double t = s + mu;
        Z.points[j] = e->certificate.center(s, t, *f);
        Z.delta = std::min(Z.delta, e->certificate.radius(s, t));
    }
    if (Z.points.empty()) Z.delta = 0.0;
    return Z;
}

bool indicator_union(const EquidistributedSequence& Z, double L, const Point& x) {
    for (const auto& [j, z] : Z.points) {
        const Point c = site_center(j, Z.G, Z.dim);
        bool inside = true;
        for (int k = 0; k < Z.dim; ++k)
            if (std::abs(c[k]) + Z.G / 2 > L / 2 + 1e-12) inside = false;
        if (inside && distance(x, z) < Z.delta) return true;
    }
    return false;
}

double lipschitz_minorant(const EquidistributedSequence& Z, double eta, double L, const Point& x) {
    require(Z.delta > 0.0 && Z.delta < Z.G / 2, ErrorKind::invalid_parameter,
            "minorant needs delta in (0, G/2)");
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& [j, z] : Z.points) {
        const Point c = site_center(j, Z.G, Z.dim);
        bool inside = true;
        for (int k = 0; k < Z.dim; ++k)
            if (std::abs(c[k]) + Z.G / 2 > L / 2 + 1e-12) inside = false;
        if (inside) nearest = std::min(nearest, distance(x, z));
    }
    const double ramp = std::clamp(2.0 * (1.0 - nearest / Z.delta), 0.0, 1.0);
    return eta * Z.delta * ramp;
}

}  // namespace randdiv
