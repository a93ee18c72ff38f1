#include "randdiv/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace randdiv {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int apply_thread_env() {
    const char* env = std::getenv("RANDDIV_THREADS");
    if (!env || !*env) return 0;
    const int n = std::atoi(env);
    if (n > 0) set_threads(n);
    return n > 0 ? n : 0;
}

namespace kernels {

void spmv_serial(const CsrView& a, std::span<const double> x, std::span<double> y) {
    const std::size_t n = a.row_ptr.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.val[p] * x[a.col[p]];
        y[i] = acc;
    }
}

void spmv_omp(const CsrView& a, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<long long>(a.row_ptr.size() - 1);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.val[p] * x[a.col[p]];
        y[i] = acc;
    }
}

}  // namespace kernels
}  // namespace randdiv
