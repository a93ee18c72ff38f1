#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "randdiv/geometry.hpp"
#include "randdiv/parallel.hpp"

namespace randdiv {

/// Uniform grid on the closed cube [-L/2, L/2]^d with Dirichlet boundary.
struct Grid {
    int dim = 1;
    double L = 1.0;
    double h = 0.25;

    Grid() = default;
    Grid(int dim, double L, double h);  // validates L/h integral, >= 2 intervals

    int intervals() const;  // L/h
    int interior_per_axis() const { return intervals() - 1; }
    std::size_t size() const;  // number of interior unknowns
};

/// Row-major d x d matrix (only the leading dim x dim block is used).
using Matrix3 = std::array<double, 9>;

Matrix3 identity_matrix(int dim);
Matrix3 diagonal_matrix(std::initializer_list<double> entries);

/// A and V sampled on the lattice of spacing h/2 over the closed cube, which
/// contains the grid nodes, edge midpoints and cell centers.
struct CoefficientField {
    Grid grid;
    std::vector<Matrix3> A;
    std::vector<double> V;
    double theta_E = 1.0;
    double theta_L = 0.0;

    int lattice_per_axis() const { return 2 * grid.intervals() + 1; }
    std::size_t lattice_size() const;
    std::size_t lattice_index(const std::array<int, kMaxDim>& m) const;
    Point lattice_point(const std::array<int, kMaxDim>& m) const;
    std::array<int, kMaxDim> lattice_multi(std::size_t index) const;

    /// Entry (r, c) of A + V Id at lattice index i.
    double composite(std::size_t i, int r, int c) const {
        return A[i][3 * r + c] + (r == c ? V[i] : 0.0);
    }
    bool is_diagonal(double tol = 0.0) const;

    using MatrixFn = std::function<Matrix3(const Point&)>;
    using ScalarFn = std::function<double(const Point&)>;
    static CoefficientField sample(const Grid& grid, const MatrixFn& A, const ScalarFn& V,
                                   double theta_E, double theta_L, Exec exec = Exec::parallel);

    /// Adds a nonnegative scalar to V pointwise.
    CoefficientField with_added_potential(const ScalarFn& W, Exec exec = Exec::parallel) const;

    std::string content_hash() const;
};

struct EllipticityReport {
    bool ok = true;
    Point worst_point{};
    double worst_eigenvalue = 1.0;  // eigenvalue farthest outside (or closest to) the band
};

struct LipschitzReport {
    bool ok = true;
    double estimate = 0.0;
};

struct DirReport {
    bool ok = true;
    std::vector<std::string> offending_faces;
};

/// Spectrum of A + V Id inside [1/theta_E, theta_E] everywhere on the lattice.
EllipticityReport validate_ellipticity(const CoefficientField& field);
LipschitzReport validate_lipschitz_field(const CoefficientField& field);
DirReport validate_dir_condition(const CoefficientField& field);

enum class StencilScheme {
    edge_midpoint,  // diagonal coefficients only, b_kk at edge midpoints
    corner_star,    // full matrix at cell centers, averaged over corner gradients
};

/// Symmetric sparse operator in CSR form; columns sorted within each row.
struct DiscreteOperator {
    Grid grid;
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
    StencilScheme scheme = StencilScheme::edge_midpoint;
    std::string field_hash;

    double entry(std::size_t i, std::size_t j) const;
    std::size_t nonzeros() const { return val.size(); }
    double inf_norm() const;
    std::vector<double> dense_rowmajor() const;
};

/// Assembles the discrete form without validating the field; used for
/// perturbation-only operators that are not elliptic on their own.
DiscreteOperator assemble_form(const CoefficientField& field, Exec exec = Exec::parallel);

/// Validates ellipticity and assembles. Throws Error(precondition) if the
/// field is not elliptic with its declared constant.
DiscreteOperator assemble_operator(const Grid& grid, const CoefficientField& field,
                                   Exec exec = Exec::parallel);

std::vector<double> apply_operator(const DiscreteOperator& H, std::span<const double> u,
                                   Exec exec = Exec::parallel);

double quadratic_form(const DiscreteOperator& H, std::span<const double> u);

}  // namespace randdiv
