#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace randdiv {

/// Kernels come in a serial reference form and an OpenMP form. Both produce
/// bit-identical output: parallel loops only split independent rows/points.
enum class Exec { serial, parallel };

int max_threads();
void set_threads(int n);

/// Reads RANDDIV_THREADS and caps the OpenMP worker count. Returns the cap
/// that was applied, or 0 when the variable is unset.
int apply_thread_env();

namespace kernels {

struct CsrView {
    std::span<const std::size_t> row_ptr;
    std::span<const std::size_t> col;
    std::span<const double> val;
};

void spmv_serial(const CsrView& a, std::span<const double> x, std::span<double> y);
void spmv_omp(const CsrView& a, std::span<const double> x, std::span<double> y);

inline void spmv(const CsrView& a, std::span<const double> x, std::span<double> y, Exec exec) {
    exec == Exec::serial ? spmv_serial(a, x, y) : spmv_omp(a, x, y);
}

/// Calls body(i) for i in [0, n); the OpenMP variant uses a static schedule.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& body) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace kernels
}  // namespace randdiv
