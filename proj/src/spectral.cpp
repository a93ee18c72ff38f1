#include "randdiv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "randdiv/error.hpp"
#include "randdiv/rng.hpp"

namespace randdiv {

const char* to_string(EigenMethod m) {
    switch (m) {
        case EigenMethod::automatic: return "automatic";
        case EigenMethod::dense: return "dense";
        case EigenMethod::iterative: return "iterative";
    }
    return "?";
}

namespace {

Eigen::MatrixXd to_dense(const DiscreteOperator& H) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(H.n),
                                              static_cast<Eigen::Index>(H.n));
    for (std::size_t i = 0; i < H.n; ++i)
        for (std::size_t p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(H.col[p])) = H.val[p];
    return M;
}

Eigen::SparseMatrix<double> to_sparse(const DiscreteOperator& H) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(H.nonzeros());
    for (std::size_t i = 0; i < H.n; ++i)
        for (std::size_t p = H.row_ptr[i]; p < H.row_ptr[i + 1]; ++p)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(H.col[p]), H.val[p]);
    Eigen::SparseMatrix<double> S(static_cast<Eigen::Index>(H.n), static_cast<Eigen::Index>(H.n));
    S.setFromTriplets(trips.begin(), trips.end());
    return S;
}

// Y = H X, column by column through the CSR kernel.
Eigen::MatrixXd apply_block(const DiscreteOperator& H, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd Y(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        kernels::spmv_serial({H.row_ptr, H.col, H.val},
                             std::span<const double>(X.col(c).data(), H.n),
                             std::span<double>(Y.col(c).data(), H.n));
    }
    return Y;
}

double residual_bound(double lambda) { return kResidualTolerance * std::max(1.0, std::abs(lambda)); }

void fill_residuals(const DiscreteOperator& H, SpectrumSlice& s) {
    const Eigen::MatrixXd HV = apply_block(H, s.vectors);
    s.residual_norms.resize(s.eigenvalues.size());
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        s.residual_norms[i] = (HV.col(c) - s.eigenvalues[i] * s.vectors.col(c)).norm();
    }
}

SpectrumSlice dense_lowest(const DiscreteOperator& H, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(H));
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::solver_failure, "dense eigensolver did not converge");
    SpectrumSlice s;
    s.k = k;
    s.method = EigenMethod::dense;
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    s.vectors = es.eigenvectors().leftCols(k);
    fill_residuals(H, s);
    return s;
}

// Orthonormalizes the columns of Y against Q[:, :m] and among themselves.
// Columns that collapse are replaced by fresh random directions.
Eigen::MatrixXd orthonormal_block(const Eigen::MatrixXd& Q, Eigen::Index m, Eigen::MatrixXd Y,
                                  Rng& rng) {
    const Eigen::Index n = Y.rows();
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = Y.col(c).norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (m > 0) Y.col(c) -= Q.leftCols(m) * (Q.leftCols(m).transpose() * Y.col(c));
                if (c > 0) Y.col(c) -= Y.leftCols(c) * (Y.leftCols(c).transpose() * Y.col(c));
            }
            const double after = Y.col(c).norm();
            if (after > 1e-10 * std::max(before, 1e-300)) {
                Y.col(c) /= after;
                break;
            }
            for (Eigen::Index i = 0; i < n; ++i) Y(i, c) = rng.uniform() - 0.5;
        }
    }
    return Y;
}

SpectrumSlice iterative_lowest(const DiscreteOperator& H, int k) {
    const auto n = static_cast<Eigen::Index>(H.n);
    const Eigen::SparseMatrix<double> S = to_sparse(H);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(S);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::solver_failure, "factorization of H failed (H not definite?)");

    const Eigen::Index block = std::min<Eigen::Index>(n, std::max(4, std::min(k, 8)));
    const Eigen::Index max_dim = n;
    Rng rng(0x5eed5eedULL + static_cast<std::uint64_t>(n));

    Eigen::MatrixXd Q(n, std::min<Eigen::Index>(max_dim, 4 * k + 8 * block));
    Eigen::MatrixXd HQ(n, Q.cols());
    Eigen::Index m = 0;

    Eigen::MatrixXd Y(n, block);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < block; ++c) Y(i, c) = rng.uniform() - 0.5;

    SpectrumSlice best;
    while (true) {
        const Eigen::Index add = std::min(block, max_dim - m);
        if (Q.cols() < m + add) {
            const Eigen::Index cols = std::min(max_dim, 2 * Q.cols());
            Q.conservativeResize(Eigen::NoChange, cols);
            HQ.conservativeResize(Eigen::NoChange, cols);
        }
        Eigen::MatrixXd Z = orthonormal_block(Q, m, Y.leftCols(add), rng);
        Q.middleCols(m, add) = Z;
        HQ.middleCols(m, add) = apply_block(H, Z);
        m += add;

        if (m >= k) {
            Eigen::MatrixXd T = Q.leftCols(m).transpose() * HQ.leftCols(m);
            T = 0.5 * (T + T.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            SpectrumSlice s;
            s.k = k;
            s.method = EigenMethod::iterative;
            s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
            s.vectors = Q.leftCols(m) * es.eigenvectors().leftCols(k);
            for (int c = 0; c < k; ++c) s.vectors.col(c).normalize();
            const Eigen::MatrixXd R = HQ.leftCols(m) * es.eigenvectors().leftCols(k);
            s.residual_norms.resize(static_cast<std::size_t>(k));
            bool converged = true;
            for (int c = 0; c < k; ++c) {
                const double res = (R.col(c) - s.eigenvalues[c] * s.vectors.col(c)).norm();
                s.residual_norms[static_cast<std::size_t>(c)] = res;
                // Aim two decades below the reporting tolerance.
                if (res > 1e-2 * residual_bound(s.eigenvalues[c])) converged = false;
            }
            best = std::move(s);
            if (converged || m >= max_dim) break;
        }
        // Next block: shift-invert images of the newest basis block.
        Eigen::MatrixXd last = Q.middleCols(m - add, add);
        Y.resize(n, add);
        for (Eigen::Index c = 0; c < add; ++c) Y.col(c) = solver.solve(last.col(c));
    }
    fill_residuals(H, best);
    return best;
}

}  // namespace

SpectrumSlice eigs_lowest(const DiscreteOperator& H, int k, EigenMethod method) {
    require(k >= 1 && static_cast<std::size_t>(k) <= H.n, ErrorKind::invalid_parameter,
            "requested " + std::to_string(k) + " eigenvalues of an operator of size " +
                std::to_string(H.n));
    if (method == EigenMethod::automatic)
        method = H.n <= kDenseLimit ? EigenMethod::dense : EigenMethod::iterative;
    SpectrumSlice s = method == EigenMethod::dense ? dense_lowest(H, k) : iterative_lowest(H, k);
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        if (!(s.residual_norms[i] <= residual_bound(s.eigenvalues[i])))
            throw Error(ErrorKind::solver_failure,
                        "eigenpair " + std::to_string(i + 1) + " residual " +
                            std::to_string(s.residual_norms[i]) + " exceeds tolerance");
    return s;
}

std::vector<double> all_eigenvalues(const DiscreteOperator& H) {
    const auto n = static_cast<Eigen::Index>(H.n);
    if (H.grid.dim == 1) {
        Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index i = 0; i < n; ++i) diag[i] = H.entry(i, i);
        for (Eigen::Index i = 0; i + 1 < n; ++i) sub[i] = H.entry(i + 1, i);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw Error(ErrorKind::solver_failure, "tridiagonal eigensolver did not converge");
        return {es.eigenvalues().data(), es.eigenvalues().data() + n};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(H), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::solver_failure, "dense eigensolver did not converge");
    return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

// ---------------------------------------------------------------------------
// Analytic Dirichlet Laplacian

namespace {

// Calls f(|m|^2) for every m in N^d with |m|^2 <= bound.
template <class F>
void for_each_lattice_norm(int dim, long bound, F&& f, long partial = 0) {
    if (dim == 0) {
        f(partial);
        return;
    }
    for (long m = 1; partial + m * m <= bound; ++m) for_each_lattice_norm(dim - 1, bound, f, partial + m * m);
}

long count_norms_at_most(int dim, double bound) {
    if (bound < dim) return 0;
    long count = 0;
    const long b = static_cast<long>(std::floor(bound));
    for_each_lattice_norm(dim, b, [&](long) { ++count; });
    return count;
}

long count_norms_below(int dim, double bound) {
    // |m|^2 < bound, integer-valued |m|^2.
    long b = static_cast<long>(std::ceil(bound)) - 1;
    if (bound <= dim) return 0;
    long count = 0;
    for_each_lattice_norm(dim, b, [&](long) { ++count; });
    return count;
}

}  // namespace

std::vector<double> laplacian_analytic(int dim, double L, int count) {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::invalid_parameter, "dimension must be 1..3");
    require(count >= 1, ErrorKind::invalid_parameter, "count must be at least 1");
    long bound = dim;
    std::vector<long> norms;
    while (true) {
        norms.clear();
        for_each_lattice_norm(dim, bound, [&](long s) { norms.push_back(s); });
        if (norms.size() >= static_cast<std::size_t>(count)) break;
        bound *= 2;
    }
    std::sort(norms.begin(), norms.end());
    std::vector<double> out(static_cast<std::size_t>(count));
    const double scale = std::numbers::pi * std::numbers::pi / (L * L);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = scale * static_cast<double>(norms[static_cast<std::size_t>(i)]);
    return out;
}

CountingResult counting_function(int dim, double L, double E_tilde) {
    require(E_tilde >= 0.0, ErrorKind::invalid_parameter, "energy must be nonnegative");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    // Closed window: allow relative roundoff so that E = pi^2 |m|^2 / L^2 counts m.
    const double analytic_bound = E_tilde * L * L / pi2 * (1 + 1e-12);
    const double wide_bound = 4.0 * E_tilde * L * L / pi2;
    return {count_norms_at_most(dim, analytic_bound), count_norms_below(dim, wide_bound)};
}

std::vector<CountingBounds> counting_sandwich(int dim, double L, const std::vector<double>& energies) {
    require(!energies.empty(), ErrorKind::invalid_parameter, "no energies given");
    std::vector<CountingBounds> out;
    double K1 = std::numeric_limits<double>::infinity(), K2 = 0.0;
    for (double E : energies) {
        const CountingResult c = counting_function(dim, L, E);
        require(c.analytic >= 1, ErrorKind::precondition,
                "energy " + std::to_string(E) + " lies below the ground state");
        CountingBounds b;
        b.E_tilde = E;
        b.exact_count = c.analytic;
        b.wide_radius_count = c.wide_radius;
        b.ratio = static_cast<double>(c.analytic) / (std::pow(E, dim / 2.0) * std::pow(L, dim));
        K1 = std::min(K1, b.ratio);
        K2 = std::max(K2, b.ratio);
        out.push_back(b);
    }
    for (auto& b : out) {
        b.K1 = K1;
        b.K2 = K2;
        const double scale = std::pow(b.E_tilde, dim / 2.0) * std::pow(L, dim);
        b.ok = K1 * scale <= static_cast<double>(b.exact_count) * (1 + 1e-12) &&
               static_cast<double>(b.exact_count) <= K2 * scale * (1 + 1e-12);
    }
    return out;
}

SandwichReport sandwich_check(const DiscreteOperator& H_A, const DiscreteOperator& H_Id,
                              double theta_E, int k) {
    require(H_A.n == H_Id.n && H_A.grid.dim == H_Id.grid.dim, ErrorKind::dimension_mismatch,
            "sandwich operators live on different grids");
    const SpectrumSlice a = eigs_lowest(H_A, k);
    const SpectrumSlice id = eigs_lowest(H_Id, k);
    SandwichReport r;
    r.k = k;
    r.lambda_A = a.eigenvalues;
    r.lambda_Id = id.eigenvalues;
    r.worst_lower_slack = std::numeric_limits<double>::infinity();
    r.worst_upper_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        const double la = a.eigenvalues[static_cast<std::size_t>(i)];
        const double li = id.eigenvalues[static_cast<std::size_t>(i)];
        r.worst_lower_slack = std::min(r.worst_lower_slack, (la - li / theta_E) / la);
        r.worst_upper_slack = std::min(r.worst_upper_slack, (theta_E * li - la) / la);
    }
    r.ok = r.worst_lower_slack >= -1e-9 && r.worst_upper_slack >= -1e-9;
    return r;
}

int count_in_window(std::span<const double> eigenvalues, double E, double eps) {
    int count = 0;
    for (double l : eigenvalues)
        if (l >= E - eps && l <= E + eps) ++count;
    return count;
}

int trace_window(const DiscreteOperator& H, double E, double eps) {
    require(eps > 0.0, ErrorKind::invalid_parameter, "window half-width must be positive");
    int k = static_cast<int>(std::min<std::size_t>(H.n, 8));
    while (true) {
        const SpectrumSlice s = eigs_lowest(H, k);
        if (s.eigenvalues.back() > E + eps) return count_in_window(s.eigenvalues, E, eps);
        if (static_cast<std::size_t>(k) == H.n) {
            if (s.eigenvalues.back() < E + eps)
                throw Error(ErrorKind::spectrum_exhausted,
                            "window top " + std::to_string(E + eps) +
                                " exceeds the largest discrete eigenvalue " +
                                std::to_string(s.eigenvalues.back()));
            return count_in_window(s.eigenvalues, E, eps);
        }
        k = static_cast<int>(std::min<std::size_t>(H.n, 2 * static_cast<std::size_t>(k)));
    }
}

}  // namespace randdiv
