#include <doctest.h>

#include "randdiv/config.hpp"
#include "randdiv/field.hpp"
#include "randdiv/parallel.hpp"
#include "randdiv/rng.hpp"
#include "randdiv/wegner.hpp"

using namespace randdiv;

namespace {

Config breather2d() {
    return parse_config("[process]\ndimension = 2\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n[family.b]\nkind = breather\nr = 1\n"
                        "[field]\nkind = oscillating\namplitude = 1/2\ntheta_E = 4\n");
}

}  // namespace

TEST_CASE("spmv serial and OpenMP agree bitwise") {
    const Config c = breather2d();
    const Grid g(2, 4.0, 1.0 / 16);
    const auto omega = sample_config(c.process, 3, 0, active_sites(c.process, 4.0));
    const auto H = random_operator(c.process, c.field, omega, g);
    Rng rng(1);
    std::vector<double> x(H.n);
    for (double& v : x) v = rng.uniform() - 0.5;
    std::vector<double> ys(H.n), yp(H.n);
    const kernels::CsrView view{H.row_ptr, H.col, H.val};
    kernels::spmv_serial(view, x, ys);
    kernels::spmv_omp(view, x, yp);
    CHECK(ys == yp);
    CHECK(apply_operator(H, x, Exec::serial) == apply_operator(H, x, Exec::parallel));
}

TEST_CASE("field sampling and assembly are bit-identical across execution modes") {
    const Config c = breather2d();
    const Grid g(2, 4.0, 1.0 / 16);
    const auto omega = sample_config(c.process, 5, 2, active_sites(c.process, 4.0));
    const auto fs = build_field(c.process, c.field, omega, g, Exec::serial);
    const auto fp = build_field(c.process, c.field, omega, g, Exec::parallel);
    CHECK(fs.V == fp.V);
    CHECK(fs.content_hash() == fp.content_hash());
    const auto Hs = assemble_operator(g, fs, Exec::serial);
    const auto Hp = assemble_operator(g, fp, Exec::parallel);
    CHECK(Hs.val == Hp.val);
    CHECK(Hs.col == Hp.col);
}

TEST_CASE("thread cap does not change Monte Carlo counts") {
    const Config c = parse_config("[process]\ndimension = 1\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n[family.a]\nkind = alloy\nr = 1/2\n");
    WegnerSetup setup;
    setup.L_values = {4.0};
    setup.epsilon_values = {0.4, 0.1};
    setup.E = 3.0;
    setup.E_minus = 0.1;
    setup.E_plus = 10.0;
    setup.samples = 16;
    setup.bootstrap = 0;
    const int before = max_threads();
    set_threads(1);
    const auto one = wegner_monte_carlo(c.process, c.field, setup);
    set_threads(4);
    const auto four = wegner_monte_carlo(c.process, c.field, setup);
    set_threads(before);
    CHECK(one.counts == four.counts);
    CHECK(one.cells.front().mean == four.cells.front().mean);
}
