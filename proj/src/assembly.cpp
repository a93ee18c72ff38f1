#include "randdiv/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <Eigen/Eigenvalues>

#include "randdiv/error.hpp"
#include "randdiv/io.hpp"

namespace randdiv {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int dim_, double L_, double h_) : dim(dim_), L(L_), h(h_) {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::invalid_parameter,
            "grid dimension must be 1, 2 or 3");
    require(L > 0.0 && h > 0.0, ErrorKind::invalid_parameter, "L and h must be positive");
    const double ratio = L / h;
    require(std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio),
            ErrorKind::invalid_parameter, "L/h must be an integer");
    require(std::round(ratio) >= 2, ErrorKind::invalid_parameter,
            "grid needs at least one interior point per axis");
}

int Grid::intervals() const { return static_cast<int>(std::lround(L / h)); }

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(interior_per_axis());
    return n;
}

Matrix3 identity_matrix(int dim) {
    Matrix3 m{};
    for (int k = 0; k < dim; ++k) m[4 * k] = 1.0;
    return m;
}

Matrix3 diagonal_matrix(std::initializer_list<double> entries) {
    Matrix3 m{};
    int k = 0;
    for (double e : entries) {
        m[4 * k] = e;
        if (++k == kMaxDim) break;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Coefficient field

std::size_t CoefficientField::lattice_size() const {
    std::size_t n = 1;
    for (int k = 0; k < grid.dim; ++k) n *= static_cast<std::size_t>(lattice_per_axis());
    return n;
}

std::size_t CoefficientField::lattice_index(const std::array<int, kMaxDim>& m) const {
    const auto P = static_cast<std::size_t>(lattice_per_axis());
    std::size_t idx = 0;
    for (int k = 0; k < grid.dim; ++k) idx = idx * P + static_cast<std::size_t>(m[k]);
    return idx;
}

std::array<int, kMaxDim> CoefficientField::lattice_multi(std::size_t index) const {
    const auto P = static_cast<std::size_t>(lattice_per_axis());
    std::array<int, kMaxDim> m{};
    for (int k = grid.dim - 1; k >= 0; --k) {
        m[k] = static_cast<int>(index % P);
        index /= P;
    }
    return m;
}

Point CoefficientField::lattice_point(const std::array<int, kMaxDim>& m) const {
    Point x{};
    for (int k = 0; k < grid.dim; ++k) x[k] = -grid.L / 2 + m[k] * (grid.h / 2);
    return x;
}

bool CoefficientField::is_diagonal(double tol) const {
    const int d = grid.dim;
    for (const auto& a : A)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (r != c && std::abs(a[3 * r + c]) > tol) return false;
    return true;
}

CoefficientField CoefficientField::sample(const Grid& grid, const MatrixFn& A_fn,
                                          const ScalarFn& V_fn, double theta_E, double theta_L,
                                          Exec exec) {
    CoefficientField f;
    f.grid = grid;
    f.theta_E = theta_E;
    f.theta_L = theta_L;
    const std::size_t n = f.lattice_size();
    f.A.resize(n);
    f.V.resize(n);
    kernels::for_each_index(n, exec, [&](std::size_t i) {
        const Point x = f.lattice_point(f.lattice_multi(i));
        f.A[i] = A_fn(x);
        f.V[i] = V_fn ? V_fn(x) : 0.0;
    });
    return f;
}

CoefficientField CoefficientField::with_added_potential(const ScalarFn& W, Exec exec) const {
    CoefficientField f = *this;
    kernels::for_each_index(f.lattice_size(), exec, [&](std::size_t i) {
        f.V[i] += W(f.lattice_point(f.lattice_multi(i)));
    });
    return f;
}

std::string CoefficientField::content_hash() const {
    std::vector<unsigned char> bytes = field_to_binary(*this);
    return sha256_hex(bytes);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

Eigen::Matrix3d composite_matrix(const CoefficientField& f, std::size_t i) {
    const int d = f.grid.dim;
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = f.composite(i, r, c);
    return m;
}

}  // namespace

EllipticityReport validate_ellipticity(const CoefficientField& field) {
    const int d = field.grid.dim;
    const double lo = 1.0 / field.theta_E, hi = field.theta_E;
    EllipticityReport report;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < field.lattice_size(); ++i) {
        const Eigen::Matrix3d m = composite_matrix(field, i);
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        for (int r = 0; r < d; ++r)
            for (int c = r + 1; c < d; ++c)
                if (std::abs(m(r, c) - m(c, r)) > 1e-12 * scale)
                    throw Error(ErrorKind::data_error,
                                "non-symmetric coefficient matrix at " +
                                    to_string(field.lattice_point(field.lattice_multi(i)), d));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(d, d),
                                                          Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        for (int k = 0; k < d; ++k) {
            const double violation = std::max(lo - ev[k], ev[k] - hi);
            if (violation > worst) {
                worst = violation;
                report.worst_eigenvalue = ev[k];
                report.worst_point = field.lattice_point(field.lattice_multi(i));
            }
        }
    }
    report.ok = worst <= 1e-10;
    return report;
}

LipschitzReport validate_lipschitz_field(const CoefficientField& field) {
    const int d = field.grid.dim;
    const int P = field.lattice_per_axis();
    const double spacing = field.grid.h / 2;
    LipschitzReport report;
    for (std::size_t i = 0; i < field.lattice_size(); ++i) {
        const auto m = field.lattice_multi(i);
        for (int k = 0; k < d; ++k) {
            if (m[k] + 1 >= P) continue;
            auto n = m;
            ++n[k];
            const std::size_t j = field.lattice_index(n);
            // Induced infinity norm: maximal absolute row sum.
            double norm_inf = 0.0;
            for (int r = 0; r < d; ++r) {
                double row = 0.0;
                for (int c = 0; c < d; ++c)
                    row += std::abs(field.composite(j, r, c) - field.composite(i, r, c));
                norm_inf = std::max(norm_inf, row);
            }
            report.estimate = std::max(report.estimate, norm_inf / spacing);
        }
    }
    report.ok = report.estimate <= field.theta_L * (1 + 1e-6);
    return report;
}

DirReport validate_dir_condition(const CoefficientField& field) {
    const int d = field.grid.dim;
    const int P = field.lattice_per_axis();
    DirReport report;
    for (int k = 0; k < d; ++k) {
        for (int side = 0; side < 2; ++side) {
            const int fixed = side == 0 ? 0 : P - 1;
            bool bad = false;
            for (std::size_t i = 0; i < field.lattice_size() && !bad; ++i) {
                const auto m = field.lattice_multi(i);
                if (m[k] != fixed) continue;
                for (int j = 0; j < d; ++j) {
                    if (j == k) continue;
                    if (std::abs(field.composite(i, j, k)) > 1e-12 ||
                        std::abs(field.composite(i, k, j)) > 1e-12)
                        bad = true;
                }
            }
            if (bad)
                report.offending_faces.push_back(std::string(side == 0 ? "-x" : "+x") +
                                                 std::to_string(k + 1));
        }
    }
    report.ok = report.offending_faces.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Discrete operator

double DiscreteOperator::entry(std::size_t i, std::size_t j) const {
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
}

double DiscreteOperator::inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) row += std::abs(val[p]);
        best = std::max(best, row);
    }
    return best;
}

std::vector<double> DiscreteOperator::dense_rowmajor() const {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) out[i * n + col[p]] = val[p];
    return out;
}

namespace {

using Multi = std::array<int, kMaxDim>;

struct Indexer {
    int dim;
    int N;  // intervals
    std::size_t unknown(const Multi& node) const {
        std::size_t idx = 0;
        for (int k = 0; k < dim; ++k)
            idx = idx * static_cast<std::size_t>(N - 1) + static_cast<std::size_t>(node[k] - 1);
        return idx;
    }
    Multi node(std::size_t unknown) const {
        Multi m{};
        for (int k = dim - 1; k >= 0; --k) {
            m[k] = static_cast<int>(unknown % static_cast<std::size_t>(N - 1)) + 1;
            unknown /= static_cast<std::size_t>(N - 1);
        }
        return m;
    }
    bool interior(const Multi& node) const {
        for (int k = 0; k < dim; ++k)
            if (node[k] < 1 || node[k] > N - 1) return false;
        return true;
    }
};

using Row = std::vector<std::pair<std::size_t, double>>;

Row edge_midpoint_row(const CoefficientField& f, const Indexer& ix, std::size_t row) {
    const Multi p = ix.node(row);
    const double inv_h2 = 1.0 / (f.grid.h * f.grid.h);
    Row out;
    double diag = 0.0;
    for (int k = 0; k < ix.dim; ++k) {
        for (int dir : {-1, 1}) {
            Multi q = p;
            q[k] += dir;
            Multi mid{};
            for (int a = 0; a < ix.dim; ++a) mid[a] = 2 * p[a];
            mid[k] += dir;
            const double w = f.composite(f.lattice_index(mid), k, k) * inv_h2;
            diag += w;
            if (ix.interior(q)) out.emplace_back(ix.unknown(q), -w);
        }
    }
    out.emplace_back(row, diag);
    std::sort(out.begin(), out.end());
    return out;
}

// Entry (tau, rho) of the corner-star element matrix of one cell, scaled by
// h^2 * 2^d. Corner-star gradient for corner sigma along axis a is
// u[sigma | a] - u[sigma & ~a].
double corner_star_entry(const Eigen::Matrix3d& B, int dim, int tau, int rho) {
    double acc = 0.0;
    const int corners = 1 << dim;
    for (int sigma = 0; sigma < corners; ++sigma) {
        for (int a = 0; a < dim; ++a) {
            const int bit_a = 1 << a;
            double ga;
            if (tau == (sigma | bit_a)) ga = 1.0;
            else if (tau == (sigma & ~bit_a)) ga = -1.0;
            else continue;
            for (int b = 0; b < dim; ++b) {
                const int bit_b = 1 << b;
                double gb;
                if (rho == (sigma | bit_b)) gb = 1.0;
                else if (rho == (sigma & ~bit_b)) gb = -1.0;
                else continue;
                acc += B(a, b) * ga * gb;
            }
        }
    }
    return acc;
}

// Value of entry (p, q), p <= q in unknown order, summed over shared cells in
// a fixed order so that (p, q) and (q, p) are bit-identical.
double corner_star_pair(const CoefficientField& f, const Indexer& ix, const Multi& p,
                        const Multi& q) {
    const int d = ix.dim;
    const double scale = 1.0 / (static_cast<double>(1 << d) * f.grid.h * f.grid.h);
    double acc = 0.0;
    const int corners = 1 << d;
    for (int tau = 0; tau < corners; ++tau) {
        Multi c{};
        bool ok = true;
        int rho = 0;
        for (int k = 0; k < d; ++k) {
            c[k] = p[k] - ((tau >> k) & 1);
            const int off = q[k] - c[k];
            if (off < 0 || off > 1) ok = false;
            rho |= off << k;
        }
        if (!ok) continue;
        Multi center{};
        for (int k = 0; k < d; ++k) center[k] = 2 * c[k] + 1;
        const std::size_t li = f.lattice_index(center);
        Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s)
                B(r, s) = 0.5 * (f.composite(li, r, s) + f.composite(li, s, r));
        acc += corner_star_entry(B, d, tau, rho);
    }
    return acc * scale;
}

Row corner_star_row(const CoefficientField& f, const Indexer& ix, std::size_t row) {
    const int d = ix.dim;
    const Multi p = ix.node(row);
    Row out;
    int count = 1;
    for (int k = 0; k < d; ++k) count *= 3;
    for (int code = 0; code < count; ++code) {
        Multi q = p;
        int c = code;
        for (int k = d - 1; k >= 0; --k) {
            q[k] += c % 3 - 1;
            c /= 3;
        }
        if (!ix.interior(q)) continue;
        const std::size_t col = ix.unknown(q);
        const double v = col >= row ? corner_star_pair(f, ix, p, q) : corner_star_pair(f, ix, q, p);
        if (v != 0.0) out.emplace_back(col, v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

DiscreteOperator assemble_form(const CoefficientField& field, Exec exec) {
    const Grid& g = field.grid;
    require(field.A.size() == field.lattice_size() && field.V.size() == field.lattice_size(),
            ErrorKind::dimension_mismatch, "coefficient field does not match its lattice");
    DiscreteOperator H;
    H.grid = g;
    H.n = g.size();
    H.scheme = field.is_diagonal() ? StencilScheme::edge_midpoint : StencilScheme::corner_star;
    const Indexer ix{g.dim, g.intervals()};

    std::vector<Row> rows(H.n);
    kernels::for_each_index(H.n, exec, [&](std::size_t i) {
        rows[i] = H.scheme == StencilScheme::edge_midpoint ? edge_midpoint_row(field, ix, i)
                                                           : corner_star_row(field, ix, i);
    });

    H.row_ptr.assign(H.n + 1, 0);
    for (std::size_t i = 0; i < H.n; ++i) H.row_ptr[i + 1] = H.row_ptr[i] + rows[i].size();
    H.col.resize(H.row_ptr.back());
    H.val.resize(H.row_ptr.back());
    kernels::for_each_index(H.n, exec, [&](std::size_t i) {
        std::size_t p = H.row_ptr[i];
        for (const auto& [c, v] : rows[i]) {
            H.col[p] = c;
            H.val[p] = v;
            ++p;
        }
    });
    return H;
}

DiscreteOperator assemble_operator(const Grid& grid, const CoefficientField& field, Exec exec) {
    require(grid.dim == field.grid.dim && grid.intervals() == field.grid.intervals() &&
                std::abs(grid.L - field.grid.L) < 1e-12,
            ErrorKind::dimension_mismatch, "field was sampled on a different grid");
    const EllipticityReport ell = validate_ellipticity(field);
    if (!ell.ok)
        throw Error(ErrorKind::precondition,
                    "assembly refused: eigenvalue " + format_double(ell.worst_eigenvalue) + " at " +
                        to_string(ell.worst_point, grid.dim) + " outside [1/theta_E, theta_E]");
    DiscreteOperator H = assemble_form(field, exec);
    H.field_hash = field.content_hash();
    return H;
}

std::vector<double> apply_operator(const DiscreteOperator& H, std::span<const double> u,
                                   Exec exec) {
    require(u.size() == H.n, ErrorKind::dimension_mismatch,
            "vector of size " + std::to_string(u.size()) + " applied to operator of size " +
                std::to_string(H.n));
    std::vector<double> y(H.n);
    kernels::spmv({H.row_ptr, H.col, H.val}, u, y, exec);
    return y;
}

double quadratic_form(const DiscreteOperator& H, std::span<const double> u) {
    const std::vector<double> Hu = apply_operator(H, u, Exec::serial);
    double acc = 0.0;
    for (std::size_t i = 0; i < H.n; ++i) acc += u[i] * Hu[i];
    return acc;
}

}  // namespace randdiv
