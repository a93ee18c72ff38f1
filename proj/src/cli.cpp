#include "randdiv/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "randdiv/config.hpp"
#include "randdiv/error.hpp"
#include "randdiv/field.hpp"
#include "randdiv/io.hpp"
#include "randdiv/spectral.hpp"
#include "randdiv/wegner.hpp"

#ifndef RANDDIV_VERSION
#define RANDDIV_VERSION "0.0.0"
#endif

namespace randdiv::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parse_error: return parse_failure;
        case ErrorKind::solver_failure:
        case ErrorKind::spectrum_exhausted: return solver_failure;
        case ErrorKind::empty_contributing_set: return empty_contributing_set;
        case ErrorKind::precondition:
        case ErrorKind::range_error: return precondition_violation;
        default: return validation_failure;
    }
}

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::string L;
    std::optional<std::string> h;
    std::string eps;
    std::string mu;
    std::optional<int> k;
    std::optional<int> n_max;
    std::string out_dir;
    std::string format = "csv";
    std::string export_field;
    std::string replay;
    int dim = 1;
    std::string energies;
};

void apply_overrides(Config& cfg, const Options& o) {
    ExperimentSpec& x = cfg.experiment;
    if (o.seed) x.seed = *o.seed;
    if (o.samples) x.samples = *o.samples;
    if (!o.L.empty()) x.L_values = parse_list(o.L);
    if (o.h) x.h = parse_number(*o.h);
    if (!o.eps.empty()) x.epsilon_values = parse_list(o.eps);
    if (!o.mu.empty()) x.mu_values = parse_list(o.mu);
    if (o.k) x.k = *o.k;
    if (o.n_max) x.n_max = *o.n_max;
}

void emit(const Options& o, const std::string& file, const std::string& payload,
          std::ostream& out) {
    if (o.out_dir.empty()) {
        out << payload;
    } else {
        write_file(fs::path(o.out_dir) / file, payload);
    }
}

RandomConfig constant_config(const std::vector<Site>& sites, double value) {
    RandomConfig c;
    for (const Site& j : sites) c.values[j] = value;
    return c;
}

Site representative_site(const FamilyEntry& e) { return e.sites ? e.sites->lo : Site{}; }

EnergyWindow energy_window(const Config& cfg, const Grid& grid) {
    EnergyWindow w = default_energy_window(
        grid, cfg.field.theta_E, std::min<int>(10, static_cast<int>(grid.size())));
    if (cfg.experiment.E_minus) w.E_minus = *cfg.experiment.E_minus;
    if (cfg.experiment.E_plus) w.E_plus = *cfg.experiment.E_plus;
    return w;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o, std::ostream& out) {
    Config cfg = load_config(o.config);
    apply_overrides(cfg, o);
    const ProcessSpec& spec = cfg.process;
    const double res = cfg.experiment.resolution;

    struct Item {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Item> items;
    auto add = [&](std::string name, bool ok, std::string detail) {
        items.push_back({std::move(name), ok, std::move(detail)});
    };

    std::vector<std::pair<double, double>> pairs;
    for (int a = 0; a <= 8; ++a)
        for (int b = a + 1; b <= 8; ++b) pairs.emplace_back(a / 8.0, b / 8.0);
    std::vector<double> t_values;
    for (int i = 0; i <= 8; ++i)
        t_values.push_back(spec.omega_minus + (spec.omega_plus - spec.omega_minus) * i / 8);

    for (const FamilyEntry& e : spec.families) {
        const SingleSiteFamily f = *spec.family_at(representative_site(e));
        const std::string tag = "[" + e.name + "]";
        const SupportReport sr = verify_support_bound(f, res);
        add("support_bound" + tag, sr.ok, "max_violation=" + format_double(sr.max_violation));
        try {
            const CertificateReport cr = verify_certificate(f, e.certificate, pairs, res);
            add("certificate" + tag, cr.ok,
                "margin=" + format_double(cr.margin) + " worst_pair=(" +
                    format_double(cr.worst_pair.first) + "," +
                    format_double(cr.worst_pair.second) + ")");
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::certificate_geometry) throw;
            add("certificate" + tag, false, err.what());
        }
        const double lip = estimate_lipschitz(f, t_values, res);
        add("lipschitz" + tag, lip <= e.K * (1 + 1e-6),
            "estimate=" + format_double(lip) + " K=" + format_double(e.K));
    }

    const Grid grid(spec.dim, cfg.experiment.L_values.front(), cfg.experiment.h);
    const std::vector<Site> Q = active_sites(spec, grid.L);
    const std::pair<const char*, double> extremes[] = {{"omega_minus", spec.omega_minus},
                                                        {"omega_one", 1.0}};
    for (const auto& [label, value] : extremes) {
        const CoefficientField field =
            build_field(spec, cfg.field, constant_config(Q, value), grid);
        const EllipticityReport er = validate_ellipticity(field);
        add(std::string("ellipticity[") + label + "]", er.ok,
            "worst_eigenvalue=" + format_double(er.worst_eigenvalue) + " at " +
                to_string(er.worst_point, spec.dim));
        const LipschitzReport lr = validate_lipschitz_field(field);
        add(std::string("lipschitz_field[") + label + "]", lr.ok,
            "estimate=" + format_double(lr.estimate) +
                " theta_L=" + format_double(cfg.field.theta_L));
    }
    const DirReport dr = validate_dir_condition(background_field(cfg.field, grid));
    std::string faces;
    for (const auto& face : dr.offending_faces) faces += (faces.empty() ? "" : ",") + face;
    add("dir_condition", dr.ok, faces.empty() ? "no offending faces" : "faces=" + faces);

    bool all_ok = true;
    for (const auto& it : items) all_ok = all_ok && it.ok;

    json j;
    j["config_hash"] = cfg.hash;
    j["ok"] = all_ok;
    j["items"] = json::array();
    for (const auto& it : items)
        j["items"].push_back({{"check", it.name}, {"ok", it.ok}, {"detail", it.detail}});
    if (o.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        for (const auto& it : items)
            out << (it.ok ? "PASS " : "FAIL ") << it.name << "  " << it.detail << "\n";
        out << (all_ok ? "all checks passed" : "validation failed") << "\n";
    }
    if (!o.out_dir.empty()) write_file(fs::path(o.out_dir) / "validate.json", j.dump(2) + "\n");
    return all_ok ? ok : validation_failure;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    CoefficientField field;
    int k = 0;
    if (!o.replay.empty()) {
        const std::string bytes = read_file(o.replay);
        field = field_from_binary(
            std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
        k = o.k.value_or(10);
    } else {
        Config cfg = load_config(o.config);
        apply_overrides(cfg, o);
        const Grid grid(cfg.process.dim, cfg.experiment.L_values.front(), cfg.experiment.h);
        const RandomConfig omega = sample_config(cfg.process, cfg.experiment.seed, 0,
                                                 active_sites(cfg.process, grid.L));
        field = build_field(cfg.process, cfg.field, omega, grid);
        k = cfg.experiment.k;
    }
    if (!o.export_field.empty()) {
        const fs::path path(o.export_field);
        if (path.extension() == ".csv") {
            write_file(path, field_to_csv(field));
        } else {
            const auto bytes = field_to_binary(field);
            write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                              bytes.size()));
        }
    }
    const DiscreteOperator H = assemble_operator(field.grid, field);
    if (k < 1 || static_cast<std::size_t>(k) > H.n)
        throw Error(ErrorKind::solver_failure, "cannot compute " + std::to_string(k) +
                                                   " eigenvalues of an operator of size " +
                                                   std::to_string(H.n));
    const SpectrumSlice s = eigs_lowest(H, k);
    if (o.format == "json") {
        json j;
        j["method"] = to_string(s.method);
        j["n"] = H.n;
        j["field_hash"] = H.field_hash;
        j["eigenvalues"] = s.eigenvalues;
        j["residuals"] = s.residual_norms;
        emit(o, "spectrum.json", j.dump(2) + "\n", out);
    } else {
        emit(o, "spectrum.csv", spectrum_to_csv(s), out);
    }
    return ok;
}

int cmd_lifting(const Options& o, std::ostream& out) {
    Config cfg = load_config(o.config);
    apply_overrides(cfg, o);
    const ExperimentSpec& x = cfg.experiment;
    const ProcessSpec& spec = cfg.process;
    const Grid grid(spec.dim, x.L_values.front(), x.h);
    const EnergyWindow w = energy_window(cfg, grid);
    const std::vector<Site> Q = active_sites(spec, grid.L);
    const std::size_t samples = std::max<std::size_t>(x.samples, 1);

    std::string csv = "sample,n,mu,lambda,lift\n";
    json per_sample = json::array();
    std::vector<Group> groups;
    bool all_positive = true;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        const RandomConfig omega = sample_config(spec, x.seed, s, Q);
        const LiftingReport r = lifting_curve(spec, cfg.field, omega, grid.L, grid.h, x.mu_values,
                                              x.n_max, w.E_minus, w.E_plus);
        all_positive = all_positive && r.all_positive;
        min_margin = std::min(min_margin, r.min_margin);
        for (std::size_t i = 0; i < r.indices.size(); ++i) {
            Group g;
            for (std::size_t m = 0; m < r.mu_values.size(); ++m) {
                csv += std::to_string(s) + "," + std::to_string(r.indices[i]) + "," +
                       format_double(r.mu_values[m]) + "," + format_double(r.base[i]) + "," +
                       format_double(r.lifts[i][m]) + "\n";
                if (r.mu_values[m] > 0.0 && r.lifts[i][m] > 0.0) {
                    g.x.push_back(std::log(r.mu_values[m]));
                    g.y.push_back(std::log(r.lifts[i][m]));
                }
            }
            if (g.x.size() >= 2) groups.push_back(std::move(g));
        }
        per_sample.push_back({{"sample", s},
                              {"contributing", r.indices},
                              {"tau_emp", r.tau_emp},
                              {"min_margin", r.min_margin},
                              {"all_positive", r.all_positive},
                              {"monotone_in_mu", r.monotone_in_mu}});
    }
    json j;
    j["config_hash"] = cfg.hash;
    j["seed"] = x.seed;
    j["L"] = grid.L;
    j["h"] = grid.h;
    j["E_minus"] = w.E_minus;
    j["E_plus"] = w.E_plus;
    j["all_positive"] = all_positive;
    j["min_margin"] = min_margin;
    if (!groups.empty()) {
        try {
            const LinearFit fit = pooled_fit(groups, x.bootstrap, x.seed);
            j["tau_emp"] = fit.slope;
            j["tau_ci"] = {fit.slope_lo, fit.slope_hi};
            j["prefactor"] = std::exp(fit.intercept);
        } catch (const Error&) {
            j["tau_emp"] = nullptr;
        }
    } else {
        j["tau_emp"] = nullptr;
    }
    j["samples"] = per_sample;

    const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
    write_file(dir / "lifting.csv", csv);
    write_file(dir / "lifting.json", j.dump(2) + "\n");
    if (o.format == "json")
        out << j.dump(2) << "\n";
    else
        out << "lifting: " << samples << " samples, all lifts positive: "
            << (all_positive ? "yes" : "no") << ", tau_emp = "
            << (j["tau_emp"].is_null() ? std::string("n/a") : format_double(j["tau_emp"]))
            << "\n";
    return ok;
}

int cmd_wegner(const Options& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    Config cfg = load_config(o.config);
    apply_overrides(cfg, o);
    const ExperimentSpec& x = cfg.experiment;
    const ProcessSpec& spec = cfg.process;

    WegnerSetup setup;
    setup.L_values = x.L_values;
    setup.epsilon_values = x.epsilon_values;
    setup.h = x.h;
    setup.samples = x.samples;
    setup.seed = x.seed;
    setup.bootstrap = x.bootstrap;
    const double L_min = *std::min_element(x.L_values.begin(), x.L_values.end());
    const EnergyWindow w = energy_window(cfg, Grid(spec.dim, L_min, x.h));
    setup.E_minus = w.E_minus;
    setup.E_plus = w.E_plus;
    setup.E = x.E.value_or((w.E_minus + w.E_plus) / 2);

    const WegnerResult r = wegner_monte_carlo(spec, cfg.field, setup);

    std::string csv = "epsilon,L,mean,stderr,samples\n";
    for (const auto& c : r.cells)
        csv += format_double(c.epsilon) + "," + format_double(c.L) + "," + format_double(c.mean) +
               "," + format_double(c.stderr_) + "," + std::to_string(c.samples) + "\n";

    std::string plot = "L,epsilon,log_epsilon,mean,log_mean,fit_log_mean\n";
    const std::size_t ne = setup.epsilon_values.size();
    for (std::size_t li = 0; li < setup.L_values.size(); ++li) {
        const LinearFit& fit = r.eps_fits[li];
        for (std::size_t e = 0; e < ne; ++e) {
            const WegnerCell& c = r.cells[li * ne + e];
            const double le = std::log(c.epsilon);
            plot += format_double(c.L) + "," + format_double(c.epsilon) + "," + format_double(le) +
                    "," + format_double(c.mean) + "," +
                    (c.mean > 0.0 ? format_double(std::log(c.mean)) : std::string()) + "," +
                    (fit.points > 0 ? format_double(fit.intercept + fit.slope * le)
                                    : std::string()) +
                    "\n";
        }
    }

    const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
    std::vector<std::pair<std::string, std::string>> files{{"wegner.csv", csv},
                                                           {"wegner_loglog.csv", plot}};
    json cells = json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"epsilon", c.epsilon},
                         {"L", c.L},
                         {"mean", c.mean},
                         {"stderr", c.stderr_},
                         {"samples", c.samples}});
    if (o.format == "json") files.emplace_back("wegner.json", cells.dump(2) + "\n");
    for (const auto& [name, payload] : files) write_file(dir / name, payload);

    json fits;
    fits["eps_monotone"] = r.eps_monotone;
    if (r.eps_fit_available)
        fits["eps_slope_pooled"] = {{"slope", r.eps_pooled.slope},
                                    {"lo", r.eps_pooled.slope_lo},
                                    {"hi", r.eps_pooled.slope_hi}};
    else
        fits["eps_slope_pooled"] = nullptr;
    fits["eps_slopes"] = json::array();
    for (std::size_t li = 0; li < setup.L_values.size(); ++li) {
        const LinearFit& f = r.eps_fits[li];
        if (f.points == 0)
            fits["eps_slopes"].push_back({{"L", setup.L_values[li]}, {"slope", nullptr}});
        else
            fits["eps_slopes"].push_back({{"L", setup.L_values[li]},
                                          {"slope", f.slope},
                                          {"lo", f.slope_lo},
                                          {"hi", f.slope_hi}});
    }
    fits["L_exponent"] = r.L_fit_available ? json(r.L_exponent) : json(nullptr);

    json manifest;
    manifest["tool"] = "randdiv";
    manifest["version"] = RANDDIV_VERSION;
    manifest["command"] = "wegner";
    manifest["config"] = {{"path", o.config}, {"sha256", cfg.hash}};
    manifest["seed"] = setup.seed;
    manifest["samples"] = setup.samples;
    manifest["L"] = setup.L_values;
    manifest["epsilon"] = setup.epsilon_values;
    manifest["h"] = setup.h;
    manifest["E"] = setup.E;
    manifest["E_minus"] = setup.E_minus;
    manifest["E_plus"] = setup.E_plus;
    manifest["fits"] = fits;
    manifest["outputs"] = json::array();
    for (const auto& [name, payload] : files)
        manifest["outputs"].push_back({{"file", name}, {"sha256", sha256_hex(payload)}});
    manifest["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    out << "wegner: " << r.cells.size() << " cells x " << setup.samples << " samples -> "
        << (dir / "wegner.csv").string() << "\n";
    out << "  eps-monotone: " << (r.eps_monotone ? "yes" : "no");
    if (r.eps_fit_available)
        out << ", eps slope " << format_double(r.eps_pooled.slope) << " (bootstrap 2.5% "
            << format_double(r.eps_pooled.slope_lo) << ")";
    if (r.L_fit_available) out << ", L exponent " << format_double(r.L_exponent);
    out << "\n";
    return ok;
}

int cmd_laplacian_check(const Options& o, std::ostream& out) {
    require(!o.energies.empty(), ErrorKind::invalid_parameter, "--energies is required");
    const std::vector<double> energies = parse_list(o.energies);
    const std::vector<double> Ls = o.L.empty() ? std::vector<double>{1.0} : parse_list(o.L);
    const double L = Ls.front();
    const int d = o.dim;
    require(d >= 1 && d <= kMaxDim, ErrorKind::invalid_parameter, "dimension must be 1..3");

    json j;
    j["d"] = d;
    j["L"] = L;
    j["energies"] = json::array();
    std::vector<double> above;
    for (double E : energies) {
        const CountingResult c = counting_function(d, L, E);
        j["energies"].push_back(
            {{"E", E}, {"count", c.analytic}, {"wide_radius_count", c.wide_radius}});
        if (c.analytic > 0) above.push_back(E);
    }
    if (!above.empty()) {
        const auto bounds = counting_sandwich(d, L, above);
        json sw = json::array();
        for (const auto& b : bounds)
            sw.push_back({{"E", b.E_tilde}, {"ratio", b.ratio}, {"ok", b.ok}});
        j["sandwich"] = {{"K1", bounds.front().K1}, {"K2", bounds.front().K2}, {"per_energy", sw}};
    }

    const double h = o.h ? parse_number(*o.h) : (d == 1 ? 1.0 / 64 : 1.0 / 32);
    const Grid grid(d, L, h);
    const int k = std::min<int>(o.k.value_or(5), static_cast<int>(grid.size()));
    const DiscreteOperator H = assemble_operator(grid, background_field(FieldSpec{}, grid));
    const SpectrumSlice s = eigs_lowest(H, k);
    const std::vector<double> exact = laplacian_analytic(d, L, k);
    json cmp = json::array();
    for (int i = 0; i < k; ++i) {
        const auto u = static_cast<std::size_t>(i);
        cmp.push_back({{"n", i + 1},
                       {"discrete", s.eigenvalues[u]},
                       {"analytic", exact[u]},
                       {"relative_error", std::abs(s.eigenvalues[u] - exact[u]) / exact[u]}});
    }
    j["discrete_vs_analytic"] = {{"h", h}, {"eigenvalues", cmp}};

    if (o.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        out << "counting (d=" << d << ", L=" << format_double(L) << ")\n";
        out << "E,count,wide_radius_count\n";
        for (const auto& e : j["energies"])
            out << format_double(e["E"]) << "," << e["count"] << "," << e["wide_radius_count"]
                << "\n";
        if (j.contains("sandwich"))
            out << "K1=" << format_double(j["sandwich"]["K1"])
                << " K2=" << format_double(j["sandwich"]["K2"]) << "\n";
        out << "n,discrete,analytic,relative_error (h=" << format_double(h) << ")\n";
        for (const auto& c : cmp)
            out << c["n"] << "," << format_double(c["discrete"]) << ","
                << format_double(c["analytic"]) << "," << format_double(c["relative_error"])
                << "\n";
    }
    if (!o.out_dir.empty())
        write_file(fs::path(o.out_dir) / "laplacian_check.json", j.dump(2) + "\n");
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    apply_thread_env();
    CLI::App app{"randdiv: random divergence-type operators, lifting and window statistics"};
    app.require_subcommand(1);
    Options o;

    app.set_help_flag("--help", "print help");
    auto common = [&](CLI::App* sub, bool needs_config) {
        sub->set_help_flag("--help", "print help");
        auto* c = sub->add_option("--config", o.config, "experiment config (INI)");
        if (needs_config) c->required();
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--samples", o.samples, "Monte Carlo samples");
        sub->add_option("--L", o.L, "side length(s), comma list");
        sub->add_option("--h", o.h, "grid spacing, e.g. 1/32");
        sub->add_option("--eps", o.eps, "window half-widths, comma list");
        sub->add_option("--out-dir", o.out_dir, "output directory");
        sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* validate = app.add_subcommand("validate", "check a process config");
    common(validate, true);
    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of one sample");
    common(spectrum, false);
    spectrum->add_option("--k", o.k, "number of eigenvalues");
    spectrum->add_option("--export-field", o.export_field, "write A + V to .csv or .rdiv");
    spectrum->add_option("--replay", o.replay, "load the field from an .rdiv table");
    auto* lifting = app.add_subcommand("lifting", "eigenvalue lifts under omega -> omega + mu");
    common(lifting, true);
    lifting->add_option("--mu", o.mu, "shifts, comma list");
    lifting->add_option("--n-max", o.n_max, "highest eigenvalue index");
    auto* wegner = app.add_subcommand("wegner", "Monte Carlo window counts");
    common(wegner, true);
    auto* lap = app.add_subcommand("laplacian-check", "counting sandwich and Laplacian oracle");
    common(lap, false);
    lap->add_option("--d", o.dim, "dimension");
    lap->add_option("--energies", o.energies, "energies, comma list")->required();
    lap->add_option("--k", o.k, "eigenvalues compared against the analytic spectrum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return parse_failure;
    }

    try {
        if (*validate) return cmd_validate(o, out);
        if (*spectrum) {
            if (o.config.empty() && o.replay.empty())
                throw Error(ErrorKind::parse_error, "spectrum needs --config or --replay");
            return cmd_spectrum(o, out);
        }
        if (*lifting) return cmd_lifting(o, out);
        if (*wegner) return cmd_wegner(o, out);
        if (*lap) return cmd_laplacian_check(o, out);
    } catch (const Error& e) {
        err << "randdiv: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "randdiv: " << e.what() << "\n";
        return validation_failure;
    }
    return ok;
}

}  // namespace randdiv::cli
