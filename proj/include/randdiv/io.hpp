#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randdiv {

struct CoefficientField;
struct SpectrumSlice;

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal representation, '.' decimal separator.
std::string format_double(double x);

/// CSV: one row per lattice point with coordinates, the d x d entries of A, then V.
std::string field_to_csv(const CoefficientField& field);

/// Binary table: "RDIV1", u32 dim, f64 L, f64 h, f64 theta_E, f64 theta_L,
/// u64 points, then per point d*d entries of A followed by V. Little-endian.
std::vector<unsigned char> field_to_binary(const CoefficientField& field);
CoefficientField field_from_binary(std::span<const unsigned char> bytes);

std::string spectrum_to_csv(const SpectrumSlice& slice);

}  // namespace randdiv
