#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "randdiv/field.hpp"
#include "randdiv/model.hpp"

namespace randdiv {

struct ExperimentSpec {
    std::vector<double> L_values{4.0};
    double h = 1.0 / 16;
    std::vector<double> epsilon_values{0.4, 0.2, 0.1, 0.05};
    std::optional<double> E;
    std::optional<double> E_minus;
    std::optional<double> E_plus;
    std::size_t samples = 64;
    std::uint64_t seed = 1;
    int k = 10;
    std::vector<double> mu_values{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    int n_max = 8;
    double resolution = 64.0;  // grid points per unit length in pointwise checks
    int bootstrap = 200;
};

struct Config {
    ProcessSpec process;
    FieldSpec field;
    ExperimentSpec experiment;
    std::string text;  // raw file contents
    std::string hash;  // SHA-256 of `text`
};

/// INI text with sections [process], [family.<name>] (one or more), [field]
/// and [experiment]. Numbers accept fractions such as 1/16. Throws
/// Error(parse_error) for syntax problems and unknown keys, and the
/// validation error of ProcessSpec::validate for inconsistent values.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

double parse_number(const std::string& s);
std::vector<double> parse_list(const std::string& s);

}  // namespace randdiv
