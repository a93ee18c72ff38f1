// Serial reference against OpenMP for the hot kernels.
#include <benchmark/benchmark.h>

#include "randdiv/config.hpp"
#include "randdiv/field.hpp"
#include "randdiv/rng.hpp"
#include "randdiv/wegner.hpp"

using namespace randdiv;

namespace {

const Config& breather2d() {
    static const Config c = parse_config(
        "[process]\ndimension = 2\nG = 2\nomega_minus = 1/4\nomega_plus = 3/4\n"
        "[family.b]\nkind = breather\nr = 1\n"
        "[field]\nkind = oscillating\namplitude = 1/2\ntheta_E = 4\n");
    return c;
}

Exec mode(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "omp"); }

void BM_FieldSampling(benchmark::State& s) {
    const Config& c = breather2d();
    const Grid g(2, 16.0, 1.0 / 16);
    const auto omega = sample_config(c.process, 1, 0, active_sites(c.process, g.L));
    for (auto _ : s) benchmark::DoNotOptimize(build_field(c.process, c.field, omega, g, mode(s)));
    label(s);
}

void BM_Assembly(benchmark::State& s) {
    const Config& c = breather2d();
    const Grid g(2, 16.0, 1.0 / 16);
    const auto omega = sample_config(c.process, 1, 0, active_sites(c.process, g.L));
    const auto field = build_field(c.process, c.field, omega, g);
    for (auto _ : s) benchmark::DoNotOptimize(assemble_operator(g, field, mode(s)));
    label(s);
}

void BM_Spmv(benchmark::State& s) {
    const Config& c = breather2d();
    const Grid g(2, 16.0, 1.0 / 32);
    const auto omega = sample_config(c.process, 1, 0, active_sites(c.process, g.L));
    const auto H = random_operator(c.process, c.field, omega, g);
    Rng rng(2);
    std::vector<double> x(H.n), y(H.n);
    for (double& v : x) v = rng.uniform();
    const kernels::CsrView view{H.row_ptr, H.col, H.val};
    for (auto _ : s) {
        kernels::spmv(view, x, y, mode(s));
        benchmark::DoNotOptimize(y.data());
    }
    s.SetItemsProcessed(static_cast<std::int64_t>(s.iterations() * H.nonzeros()));
    label(s);
}

void BM_MonteCarlo(benchmark::State& s) {
    const Config c = parse_config(
        "[process]\ndimension = 1\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n"
        "[family.a]\nkind = alloy\nr = 1/2\n[field]\ntheta_E = 2\n");
    WegnerSetup setup;
    setup.L_values = {8.0};
    setup.epsilon_values = {0.4, 0.1};
    setup.E = 3.0;
    setup.E_minus = 0.1;
    setup.E_plus = 100.0;
    setup.samples = 64;
    setup.bootstrap = 0;
    for (auto _ : s) benchmark::DoNotOptimize(wegner_monte_carlo(c.process, c.field, setup, mode(s)));
    label(s);
}

}  // namespace

BENCHMARK(BM_FieldSampling)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assembly)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spmv)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
