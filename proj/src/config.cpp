#include "randdiv/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "randdiv/error.hpp"
#include "randdiv/io.hpp"

namespace randdiv {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty())
        throw Error(ErrorKind::parse_error, "not a number: '" + s + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::parse_error, "not a nonnegative integer: '" + raw + "'");
    return v;
}

int parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::parse_error, "not an integer: '" + raw + "'");
    return v;
}

// "lo:hi" per axis, axes separated by commas: "-2:1" or "-2,-2:1,1".
SiteRange parse_range(const std::string& raw, int dim) {
    const auto colon = raw.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::parse_error, "site range needs 'lo:hi', got '" + raw + "'");
    auto axis = [&](const std::string& part) {
        std::vector<int> out;
        std::stringstream ss(part);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(parse_int(tok));
        if (out.size() == 1) out.resize(static_cast<std::size_t>(dim), out[0]);
        if (out.size() != static_cast<std::size_t>(dim))
            throw Error(ErrorKind::parse_error, "site range '" + raw + "' has wrong dimension");
        return out;
    };
    const auto lo = axis(raw.substr(0, colon));
    const auto hi = axis(raw.substr(colon + 1));
    SiteRange r;
    for (int k = 0; k < dim; ++k) {
        r.lo[k] = lo[static_cast<std::size_t>(k)];
        r.hi[k] = hi[static_cast<std::size_t>(k)];
        if (r.lo[k] > r.hi[k]) throw Error(ErrorKind::parse_error, "empty site range '" + raw + "'");
    }
    return r;
}

void check_keys(const pt::ptree& section, const std::string& name,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : section) {
        if (!value.empty())
            throw Error(ErrorKind::parse_error, "nested key in [" + name + "]");
        if (!allowed.count(key))
            throw Error(ErrorKind::parse_error, "unknown key '" + key + "' in [" + name + "]");
    }
}

std::optional<std::string> get(const pt::ptree& section, const std::string& key) {
    auto it = section.find(key);
    if (it == section.not_found()) return std::nullopt;
    return trim(it->second.data());
}

std::string need(const pt::ptree& section, const std::string& name, const std::string& key) {
    auto v = get(section, key);
    if (!v) throw Error(ErrorKind::parse_error, "[" + name + "] is missing '" + key + "'");
    return *v;
}

FamilyEntry parse_family(const pt::ptree& sec, const std::string& section, const std::string& name,
                         int dim) {
    check_keys(sec, section,
               {"kind", "r", "M", "K", "sites", "alpha", "beta", "p", "q", "center_rule",
                "t_nodes", "y_nodes", "values"});
    FamilyEntry e;
    e.name = name;
    e.kind = family_kind_from_string(need(sec, section, "kind"));
    if (auto v = get(sec, "r")) e.r = parse_number(*v);
    if (auto v = get(sec, "M")) e.M = parse_number(*v);
    if (auto v = get(sec, "K")) e.K = parse_number(*v);
    if (auto v = get(sec, "sites")) e.sites = parse_range(*v, dim);
    auto& c = e.certificate;
    switch (e.kind) {
        case FamilyKind::alloy:
            c = {0.5, e.r / 2, 1.0, 0.0, CenterRule::site_center};
            break;
        case FamilyKind::breather:
            c = {0.5, e.r / 4, 1.0, 1.0, CenterRule::breather_inner};
            break;
        case FamilyKind::tabulated: break;
    }
    if (auto v = get(sec, "alpha")) c.alpha = parse_number(*v);
    if (auto v = get(sec, "beta")) c.beta = parse_number(*v);
    if (auto v = get(sec, "p")) c.p = parse_number(*v);
    if (auto v = get(sec, "q")) c.q = parse_number(*v);
    if (auto v = get(sec, "center_rule")) c.rule = center_rule_from_string(*v);
    if (e.kind == FamilyKind::tabulated) {
        auto table = std::make_shared<FamilyTable>();
        table->t_nodes = parse_list(need(sec, section, "t_nodes"));
        table->y_nodes = parse_list(need(sec, section, "y_nodes"));
        table->values = parse_list(need(sec, section, "values"));
        e.table = std::move(table);
    }
    return e;
}

}  // namespace

double parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_plain(s);
    const double num = parse_plain(trim(s.substr(0, slash)));
    const double den = parse_plain(trim(s.substr(slash + 1)));
    if (den == 0.0) throw Error(ErrorKind::parse_error, "zero denominator in '" + raw + "'");
    return num / den;
}

std::vector<double> parse_list(const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_number(tok));
    if (out.empty()) throw Error(ErrorKind::parse_error, "empty list '" + raw + "'");
    return out;
}

Config parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::parse_error, std::string("config: ") + e.what());
    }

    Config cfg;
    cfg.text = text;
    cfg.hash = sha256_hex(text);

    auto section = [&](const std::string& name) -> const pt::ptree* {
        auto it = tree.find(name);
        return it == tree.not_found() ? nullptr : &it->second;
    };
    for (const auto& [name, sec] : tree) {
        if (!sec.data().empty() && sec.empty())
            throw Error(ErrorKind::parse_error, "key '" + name + "' outside any section");
        if (name != "process" && name != "field" && name != "experiment" &&
            name.rfind("family.", 0) != 0)
            throw Error(ErrorKind::parse_error, "unknown section [" + name + "]");
    }

    const pt::ptree* proc = section("process");
    if (!proc) throw Error(ErrorKind::parse_error, "missing [process] section");
    check_keys(*proc, "process",
               {"dimension", "G", "omega_minus", "omega_plus", "J", "density", "density_values"});
    ProcessSpec& p = cfg.process;
    p.dim = parse_int(need(*proc, "process", "dimension"));
    if (p.dim < 1 || p.dim > kMaxDim)
        throw Error(ErrorKind::parse_error, "dimension must be 1, 2 or 3");
    p.G = parse_number(need(*proc, "process", "G"));
    p.omega_minus = parse_number(need(*proc, "process", "omega_minus"));
    p.omega_plus = parse_number(need(*proc, "process", "omega_plus"));
    const std::string density = get(*proc, "density").value_or("uniform");
    if (density == "uniform") {
        p.density = Density::uniform(p.omega_minus, p.omega_plus);
    } else if (density == "table") {
        p.density = Density::table(p.omega_minus, p.omega_plus,
                                   parse_list(need(*proc, "process", "density_values")));
    } else {
        throw Error(ErrorKind::parse_error, "unknown density '" + density + "'");
    }
    p.J = get(*proc, "J") ? parse_number(*get(*proc, "J")) : p.density.sup();

    for (const auto& [name, sec] : tree)
        if (name.rfind("family.", 0) == 0)
            p.families.push_back(parse_family(sec, name, name.substr(7), p.dim));

    if (const pt::ptree* f = section("field")) {
        check_keys(*f, "field", {"kind", "diag", "amplitude", "theta_E", "theta_L"});
        FieldSpec& fs = cfg.field;
        if (auto v = get(*f, "kind")) fs.kind = field_kind_from_string(*v);
        if (auto v = get(*f, "diag")) {
            const auto d = parse_list(*v);
            if (d.size() != static_cast<std::size_t>(p.dim))
                throw Error(ErrorKind::parse_error, "[field] diag needs one entry per axis");
            for (int k = 0; k < p.dim; ++k) fs.diag[k] = d[static_cast<std::size_t>(k)];
        }
        if (auto v = get(*f, "amplitude")) fs.amplitude = parse_number(*v);
        if (auto v = get(*f, "theta_E")) fs.theta_E = parse_number(*v);
        if (auto v = get(*f, "theta_L")) fs.theta_L = parse_number(*v);
    }

    if (const pt::ptree* x = section("experiment")) {
        check_keys(*x, "experiment",
                   {"L", "h", "eps", "E", "E_minus", "E_plus", "samples", "seed", "k", "mu",
                    "n_max", "resolution", "bootstrap"});
        ExperimentSpec& ex = cfg.experiment;
        if (auto v = get(*x, "L")) ex.L_values = parse_list(*v);
        if (auto v = get(*x, "h")) ex.h = parse_number(*v);
        if (auto v = get(*x, "eps")) ex.epsilon_values = parse_list(*v);
        if (auto v = get(*x, "E")) ex.E = parse_number(*v);
        if (auto v = get(*x, "E_minus")) ex.E_minus = parse_number(*v);
        if (auto v = get(*x, "E_plus")) ex.E_plus = parse_number(*v);
        if (auto v = get(*x, "samples")) ex.samples = parse_unsigned(*v);
        if (auto v = get(*x, "seed")) ex.seed = parse_unsigned(*v);
        if (auto v = get(*x, "k")) ex.k = parse_int(*v);
        if (auto v = get(*x, "mu")) ex.mu_values = parse_list(*v);
        if (auto v = get(*x, "n_max")) ex.n_max = parse_int(*v);
        if (auto v = get(*x, "resolution")) ex.resolution = parse_number(*v);
        if (auto v = get(*x, "bootstrap")) ex.bootstrap = parse_int(*v);
    }

    p.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

}  // namespace randdiv
