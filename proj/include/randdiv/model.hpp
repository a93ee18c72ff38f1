#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "randdiv/geometry.hpp"

namespace randdiv {

enum class FamilyKind { alloy, breather, tabulated };

const char* to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& s);

/// Values of u(t, y) on a product grid, y = x - G*j the site-local coordinate.
/// `values` is row-major in (t, y_1, ..., y_d). Outside the y-node range the
/// table is zero.
struct FamilyTable {
    std::vector<double> t_nodes;
    std::vector<double> y_nodes;
    std::vector<double> values;

    double interpolate(double t, const Point& y, int dim) const;
    void validate(int dim) const;
};

/// The single-site perturbation u_j(t, x) at one lattice site.
struct SingleSiteFamily {
    Site site{};
    int dim = 1;
    FamilyKind kind = FamilyKind::alloy;
    double r = 0.5;  // hat radius, unused for tabulated
    double G = 1.0;
    double M = 1.0;
    double K = 0.0;
    std::shared_ptr<const FamilyTable> table;

    Point center() const { return site_center(site, G, dim); }

    /// Largest sup-norm distance from the site center at which u(t, .) may be
    /// nonzero for some t in [0, 1].
    double support_reach() const;
};

/// (1 - |x|/r)_+ ; requires r in (0, 1).
double hat_bump(double r, const Point& x);

/// Same profile without the parameter-range check, used for dilated bumps.
double hat_profile(double r, double radius);

/// u_j(t, x).
double evaluate_family(const SingleSiteFamily& f, double t, const Point& x);

enum class CenterRule {
    site_center,     // x0 = G*j
    breather_outer,  // radius r*(s + (t-s)/4) along e_1
    breather_inner,  // radius r*(s*t/2 + (t-s)/4) along e_1
};

const char* to_string(CenterRule rule);
CenterRule center_rule_from_string(const std::string& s);

/// Witness for u(t) - u(s) >= alpha (t-s)^p on B(x0, beta (t-s)^q).
struct MonotonicityCertificate {
    double alpha = 0.5;
    double beta = 0.25;
    double p = 1.0;
    double q = 0.0;
    CenterRule rule = CenterRule::site_center;

    Point center(double s, double t, const SingleSiteFamily& f) const;
    double radius(double s, double t) const;
    double height(double s, double t) const;
};

/// Probability density on [lo, hi]: uniform, or piecewise linear through
/// equally spaced node values.
class Density {
public:
    static Density uniform(double lo, double hi);
    static Density table(double lo, double hi, std::vector<double> node_values);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool is_uniform() const { return nodes_.empty(); }
    const std::vector<double>& nodes() const { return nodes_; }

    double pdf(double x) const;
    double cdf(double x) const;
    double inverse_cdf(double u) const;
    double sup() const;
    double integral() const;

    /// Interior points where the density is only piecewise smooth.
    std::vector<double> breakpoints() const;

private:
    double lo_ = 0, hi_ = 1;
    std::vector<double> nodes_;
    std::vector<double> segment_mass_;
};

struct SiteRange {
    Site lo{};
    Site hi{};
    bool contains(const Site& j, int dim) const;
};

/// One family kind applied to a set of lattice sites.
struct FamilyEntry {
    std::string name;
    FamilyKind kind = FamilyKind::alloy;
    double r = 0.5;
    double M = 1.0;
    double K = 0.0;
    std::shared_ptr<const FamilyTable> table;
    MonotonicityCertificate certificate;
    std::optional<SiteRange> sites;  // all of Z^d when empty
};

struct ProcessSpec {
    int dim = 1;
    double G = 1.0;
    std::vector<FamilyEntry> families;
    double omega_minus = 0.25;
    double omega_plus = 0.75;
    Density density = Density::uniform(0.25, 0.75);
    double J = 2.0;

    /// Validates the constants and the density. Throws Error.
    void validate() const;

    const FamilyEntry* entry_at(const Site& j) const;
    std::optional<SingleSiteFamily> family_at(const Site& j) const;
    double reach() const;
    double mu_plus() const { return 1.0 - omega_plus; }
};

struct RandomConfig {
    std::map<Site, double> values;
    std::uint64_t seed = 0;
    std::uint64_t sample_id = 0;

    double at(const Site& j) const;
    bool contains(const Site& j) const { return values.count(j) != 0; }
};

struct EquidistributedSequence {
    int dim = 1;
    double G = 1.0;
    double delta = 0.25;
    std::map<Site, Point> points;

    void validate() const;
};

/// Sum over sites of u_j(omega_j, x). Sites absent from the config do not contribute.
double assemble_potential(const ProcessSpec& spec, const RandomConfig& cfg, const Point& x);

/// Sites whose perturbation can reach the open cube Λ_L. For families with
/// support inside G*Λ_1(j) this is {j : Λ_G(Gj) ∩ Λ_L ≠ ∅}.
std::vector<Site> active_sites(const ProcessSpec& spec, double L);

/// Sites j with Λ_G(Gj) ⊂ Λ_L.
std::vector<Site> interior_sites(const ProcessSpec& spec, double L);

struct SupportReport {
    bool ok = true;
    double max_violation = 0.0;
};

SupportReport verify_support_bound(const SingleSiteFamily& f, double grid_resolution,
                                   double t_step = 1.0 / 16);

struct CertificateReport {
    bool ok = true;
    std::pair<double, double> worst_pair{0.0, 0.0};
    double margin = 0.0;
};

CertificateReport verify_certificate(const SingleSiteFamily& f, const MonotonicityCertificate& c,
                                     const std::vector<std::pair<double, double>>& pairs,
                                     double grid_resolution = 64.0, double tolerance = 1e-9);

double estimate_lipschitz(const SingleSiteFamily& f, const std::vector<double>& t_values,
                          double grid_resolution = 64.0);

std::uint64_t site_seed(std::uint64_t seed, std::uint64_t sample_id, const Site& j);

RandomConfig sample_config(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t sample_id,
                           const std::vector<Site>& sites);

RandomConfig shift_config(const RandomConfig& cfg, double mu, const std::vector<Site>& Q);

/// Centers x0(omega_j, omega_j + mu, j) for the sites with Λ_G(Gj) ⊂ Λ_L;
/// delta is the common ball radius beta * mu^q.
EquidistributedSequence certificate_centers(const ProcessSpec& spec, const RandomConfig& cfg,
                                            double mu, double L);

bool indicator_union(const EquidistributedSequence& Z, double L, const Point& x);

double lipschitz_minorant(const EquidistributedSequence& Z, double eta, double L, const Point& x);

}  // namespace randdiv
