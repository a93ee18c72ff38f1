#include "randdiv/field.hpp"

#include <cmath>
#include <numbers>

#include "randdiv/error.hpp"

namespace randdiv {

const char* to_string(FieldSpec::Kind kind) {
    switch (kind) {
        case FieldSpec::Kind::identity: return "identity";
        case FieldSpec::Kind::diagonal: return "diagonal";
        case FieldSpec::Kind::oscillating: return "oscillating";
    }
    return "?";
}

FieldSpec::Kind field_kind_from_string(const std::string& s) {
    if (s == "identity") return FieldSpec::Kind::identity;
    if (s == "diagonal") return FieldSpec::Kind::diagonal;
    if (s == "oscillating") return FieldSpec::Kind::oscillating;
    throw Error(ErrorKind::parse_error, "unknown field kind '" + s + "'");
}

Matrix3 FieldSpec::matrix_at(const Point& x, int dim) const {
    Matrix3 m{};
    for (int k = 0; k < dim; ++k) {
        switch (kind) {
            case Kind::identity: m[4 * k] = 1.0; break;
            case Kind::diagonal: m[4 * k] = diag[k]; break;
            case Kind::oscillating: {
                const double s = std::sin(std::numbers::pi * x[k]);
                m[4 * k] = diag[k] * (1.0 + amplitude * s * s);
                break;
            }
        }
    }
    return m;
}

CoefficientField build_field(const ProcessSpec& spec, const FieldSpec& field,
                             const RandomConfig& cfg, const Grid& grid, Exec exec) {
    require(spec.dim == grid.dim, ErrorKind::dimension_mismatch,
            "process and grid dimensions differ");
    const int d = grid.dim;
    return CoefficientField::sample(
        grid, [&](const Point& x) { return field.matrix_at(x, d); },
        [&](const Point& x) { return assemble_potential(spec, cfg, x); }, field.theta_E,
        field.theta_L, exec);
}

CoefficientField background_field(const FieldSpec& field, const Grid& grid, Exec exec) {
    const int d = grid.dim;
    return CoefficientField::sample(
        grid, [&](const Point& x) { return field.matrix_at(x, d); },
        [](const Point&) { return 0.0; }, field.theta_E, field.theta_L, exec);
}

DiscreteOperator random_operator(const ProcessSpec& spec, const FieldSpec& field,
                                 const RandomConfig& cfg, const Grid& grid, Exec exec) {
    return assemble_operator(grid, build_field(spec, field, cfg, grid, exec), exec);
}

}  // namespace randdiv
