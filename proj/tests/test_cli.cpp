#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "randdiv/cli.hpp"
#include "randdiv/io.hpp"

namespace fs = std::filesystem;
using namespace randdiv;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "randdiv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string preset(const std::string& name) {
    return (fs::path(RANDDIV_PRESETS_DIR) / name).string();
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("randdiv_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& contents) const {
        write_file(path / name, contents);
        return (path / name).string();
    }
};

}  // namespace

TEST_CASE("validate") {
    CHECK(run({"validate", "--config", preset("alloy.ini")}).code == cli::ok);
    CHECK(run({"validate", "--config", preset("breather_g2.ini")}).code == cli::ok);

    TempDir tmp;
    std::string text = read_file(preset("alloy.ini"));
    const auto pos = text.find("M = 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 5, "M = 1/4");
    const auto low = run({"validate", "--config", tmp.file("low.ini", text)});
    CHECK(low.code == cli::validation_failure);
    CHECK(low.out.find("FAIL") != std::string::npos);
    CHECK(low.out.find("support") != std::string::npos);

    CHECK(run({"validate", "--config", tmp.file("bad.ini", "[process\nG = \n")}).code ==
          cli::parse_failure);
    CHECK(run({"validate", "--config", tmp.file("key.ini", "[process]\nwhat = 1\n")}).code ==
          cli::parse_failure);
    CHECK(run({"validate"}).code == cli::parse_failure);
}

TEST_CASE("spectrum of the unperturbed Laplacian") {
    const auto r = run({"spectrum", "--config", preset("zero.ini")});
    REQUIRE(r.code == cli::ok);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "index,eigenvalue,residual");
    for (int m = 1; m <= 3; ++m) {
        REQUIRE(std::getline(lines, line));
        const double lambda = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(lambda - m * m * M_PI * M_PI) <= 0.01 * m * m * M_PI * M_PI);
    }
    CHECK(run({"spectrum", "--config", preset("zero.ini")}).out == r.out);
    const auto big = run({"spectrum", "--config", preset("zero.ini"), "--k", "64"});
    CHECK(big.code == cli::solver_failure);
    CHECK_FALSE(big.err.empty());
}

TEST_CASE("spectrum field export and replay") {
    TempDir tmp;
    const std::string table = (tmp.path / "field.rdiv").string();
    const auto a = run({"spectrum", "--config", preset("alloy.ini"), "--export-field", table});
    REQUIRE(a.code == cli::ok);
    const auto b = run({"spectrum", "--replay", table, "--k", "10"});
    REQUIRE(b.code == cli::ok);
    CHECK(a.out == b.out);
}

TEST_CASE("lifting") {
    TempDir tmp;
    const auto r = run({"lifting", "--config", preset("alloy.ini"), "--samples", "2", "--mu",
                        "0,1/32,1/16,1/8", "--out-dir", tmp.path.string()});
    REQUIRE(r.code == cli::ok);
    const std::string csv = read_file(tmp.path / "lifting.csv");
    CHECK(csv.find(",0,") != std::string::npos);  // mu = 0 row present
    CHECK(fs::exists(tmp.path / "lifting.json"));

    std::string text = read_file(preset("alloy.ini"));
    text.replace(text.find("[experiment]"), 12, "[experiment]\nE_minus = 1000\nE_plus = 2000");
    const auto none = run({"lifting", "--config", tmp.file("far.ini", text), "--samples", "1",
                           "--out-dir", tmp.path.string()});
    CHECK(none.code == cli::empty_contributing_set);
}

TEST_CASE("wegner") {
    TempDir a, b;
    const std::vector<std::string> base{"wegner", "--config", preset("alloy.ini"), "--samples",
                                        "16", "--eps", "0.4,0.2,0.1"};
    auto with_dir = [&](const TempDir& d) {
        auto args = base;
        args.push_back("--out-dir");
        args.push_back(d.path.string());
        return run(args);
    };
    REQUIRE(with_dir(a).code == cli::ok);
    REQUIRE(with_dir(b).code == cli::ok);
    CHECK(sha256_file(a.path / "wegner.csv") == sha256_file(b.path / "wegner.csv"));
    CHECK(fs::exists(a.path / "manifest.json"));
    CHECK(read_file(a.path / "manifest.json").find(sha256_file(a.path / "wegner.csv")) !=
          std::string::npos);

    // Means nondecreasing in epsilon for each L.
    std::istringstream lines(read_file(a.path / "wegner.csv"));
    std::string line;
    std::getline(lines, line);
    std::vector<double> means;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string t; std::getline(ss, t, ',');) f.push_back(t);
        means.push_back(std::stod(f[2]));
    }
    REQUIRE(means.size() == 6);
    for (std::size_t L = 0; L < 2; ++L) {
        CHECK(means[3 * L] >= means[3 * L + 1]);
        CHECK(means[3 * L + 1] >= means[3 * L + 2]);
    }

    auto zero = base;
    zero[4] = "0";
    zero.push_back("--out-dir");
    zero.push_back(a.path.string());
    CHECK(run(zero).code == cli::precondition_violation);
}

TEST_CASE("laplacian-check") {
    const auto r = run({"laplacian-check", "--d", "1", "--energies", "5,10,100", "--format", "json"});
    REQUIRE(r.code == cli::ok);
    CHECK(r.out.find("\"count\": 0") != std::string::npos);
    CHECK(r.out.find("\"count\": 1") != std::string::npos);
    CHECK(r.out.find("K1") != std::string::npos);
    CHECK(run({"laplacian-check", "--d", "1"}).code == cli::parse_failure);
}
