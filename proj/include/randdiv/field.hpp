#pragma once

#include <array>
#include <string>

#include "randdiv/assembly.hpp"
#include "randdiv/model.hpp"

namespace randdiv {

/// Deterministic background matrix A of the random operator H(A + V_omega Id).
struct FieldSpec {
    enum class Kind { identity, diagonal, oscillating };
    Kind kind = Kind::identity;
    std::array<double, kMaxDim> diag{1.0, 1.0, 1.0};  // diagonal: constant entries
    double amplitude = 0.0;  // oscillating: a_kk = diag_k (1 + amplitude sin^2(pi x_k))
    double theta_E = 2.0;
    double theta_L = 0.0;

    Matrix3 matrix_at(const Point& x, int dim) const;
};

const char* to_string(FieldSpec::Kind kind);
FieldSpec::Kind field_kind_from_string(const std::string& s);

/// A + V_omega on the grid lattice. Sites missing from `cfg` contribute nothing.
CoefficientField build_field(const ProcessSpec& spec, const FieldSpec& field,
                             const RandomConfig& cfg, const Grid& grid, Exec exec = Exec::parallel);

/// A alone, with V = 0.
CoefficientField background_field(const FieldSpec& field, const Grid& grid,
                                  Exec exec = Exec::parallel);

DiscreteOperator random_operator(const ProcessSpec& spec, const FieldSpec& field,
                                 const RandomConfig& cfg, const Grid& grid,
                                 Exec exec = Exec::parallel);

}  // namespace randdiv
