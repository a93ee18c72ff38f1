#include <doctest.h>

#include <filesystem>

#include "randdiv/config.hpp"
#include "randdiv/error.hpp"
#include "randdiv/field.hpp"
#include "randdiv/io.hpp"
#include "randdiv/spectral.hpp"

using namespace randdiv;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::data_error;
}

}  // namespace

TEST_CASE("numbers and lists") {
    CHECK(parse_number("1/16") == 0.0625);
    CHECK(parse_number(" 0.25 ") == 0.25);
    CHECK(parse_number("-3/4") == -0.75);
    CHECK(parse_list("1/64, 1/32,0.5") == std::vector<double>{1.0 / 64, 1.0 / 32, 0.5});
    CHECK_THROWS_AS(parse_number("abc"), Error);
    CHECK_THROWS_AS(parse_number("1/0"), Error);
}

TEST_CASE("full config") {
    const Config c = parse_config(R"(
[process]
dimension = 2
G = 2
omega_minus = 1/4
omega_plus = 3/4
[family.a]
kind = alloy
r = 1/2
sites = -1,-1:0,0
[family.b]
kind = breather
r = 1
[field]
kind = oscillating
diag = 1,2
amplitude = 1/2
theta_E = 4
[experiment]
L = 4,8
h = 1/8
eps = 0.2,0.1
samples = 3
seed = 99
)");
    CHECK(c.process.dim == 2);
    CHECK(c.process.G == 2.0);
    REQUIRE(c.process.families.size() == 2);
    CHECK(c.process.families[0].certificate.beta == 0.25);
    CHECK(c.process.families[1].certificate.rule == CenterRule::breather_inner);
    CHECK(c.process.families[1].certificate.q == 1.0);
    CHECK(c.process.entry_at({-1, 0, 0})->name == "a");
    CHECK(c.process.entry_at({1, 0, 0})->name == "b");
    CHECK(c.field.kind == FieldSpec::Kind::oscillating);
    CHECK(c.field.diag[1] == 2.0);
    CHECK(c.experiment.L_values == std::vector<double>{4.0, 8.0});
    CHECK(c.experiment.h == 0.125);
    CHECK(c.experiment.samples == 3);
    CHECK(c.experiment.seed == 99);
    CHECK(c.hash.size() == 64);
    const Matrix3 A = c.field.matrix_at({0.5, 0.5, 0.0}, 2);
    CHECK(A[0] == doctest::Approx(1.5));
    CHECK(A[4] == doctest::Approx(3.0));
}

TEST_CASE("config errors") {
    CHECK(kind_of("[process\n") == ErrorKind::parse_error);
    CHECK(kind_of("[process]\ndimension = 1\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\nbogus = 1\n") == ErrorKind::parse_error);
    CHECK(kind_of("[nonsense]\n") == ErrorKind::parse_error);
    CHECK(kind_of("top = 1\n") == ErrorKind::parse_error);
    CHECK(kind_of("[family.x]\nr = 1/2\n") == ErrorKind::parse_error);
    CHECK(kind_of("[process]\ndimension = 1\nG = 1\nomega_minus = 0.8\nomega_plus = 0.5\n") ==
          ErrorKind::invalid_parameter);
}

TEST_CASE("bundled presets parse") {
    for (const char* name : {"alloy.ini", "breather.ini", "breather_g2.ini", "zero.ini"})
        CHECK_NOTHROW(load_config(std::filesystem::path(RANDDIV_PRESETS_DIR) / name));
}

TEST_CASE("sha256") {
    CHECK(sha256_hex(std::string_view("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(std::string_view("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("format double round-trips") {
    for (double x : {0.1, 1.0 / 3, 1e-300, 12345.678, -2.5})
        CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("field binary round trip") {
    const Config c = parse_config("[process]\ndimension = 2\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n[family.a]\nkind = alloy\nr = 1/2\n"
                                  "[field]\nkind = oscillating\namplitude = 1/4\n");
    const Grid g(2, 2.0, 0.25);
    const auto omega = sample_config(c.process, 1, 0, active_sites(c.process, 2.0));
    const auto f = build_field(c.process, c.field, omega, g);
    const auto bytes = field_to_binary(f);
    const auto back = field_from_binary(bytes);
    CHECK(back.grid.dim == 2);
    CHECK(back.grid.L == 2.0);
    CHECK(back.grid.h == 0.25);
    CHECK(back.V == f.V);
    CHECK(back.content_hash() == f.content_hash());
    std::vector<unsigned char> bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(field_from_binary(bad), Error);

    const std::string csv = field_to_csv(f);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(f.lattice_size()) + 1);
}

TEST_CASE("spectrum csv") {
    const Config c = parse_config("[process]\ndimension = 1\nG = 1\nomega_minus = 1/4\nomega_plus = 3/4\n");
    const Grid g(1, 1.0, 0.25);
    const auto s = eigs_lowest(random_operator(c.process, c.field, {}, g), 2);
    const std::string csv = spectrum_to_csv(s);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
