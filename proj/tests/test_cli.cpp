#include <doctest.h>

#include "nfpe/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir() {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         ("nfpe_cli_test_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << body;
    return p;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"nfpe_cli"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    return nfpe::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMomentConfig = R"({
  "schema": "1",
  "command": "moment",
  "output": {"prefix": "m"},
  "model": {"alpha": 0.44, "kappa": 0.1, "a": 0.0, "epsilon": 0.019, "s": 0.0},
  "coefficients": {"kind": "constant", "f0": 1.0, "g0": 0.0,
                   "beta": {"mode": "self-consistent"}},
  "times": [1.0],
  "moment": {"x_start": 1.0}
})";

const char* kEvolveConfig = R"({
  "schema": "1",
  "command": "evolve-exact",
  "output": {"prefix": "e"},
  "model": {"alpha": 0.44, "kappa": 0.0, "a": 1.0, "epsilon": 0.019, "s": 0.0},
  "coefficients": {"kind": "exact-family", "f_s": 1.0, "g_s": 0.04,
                   "beta": {"mode": "constant", "value": 0.0}},
  "initial": {"mean": 0.3, "variance": 0.01},
  "grid": {"x_min": -2.0, "x_max": 2.0, "n": 401},
  "times": [0.25]
})";

} // namespace

TEST_CASE("cli: moment command writes the closed-form value") {
    const fs::path dir = fresh_dir();
    const fs::path cfg = write_config(dir, kMomentConfig);
    const int rc = run({"--config", cfg.string(), "--out", dir.string()});
    REQUIRE(rc == 0);

    const std::string csv = slurp(dir / "m_moment.csv");
    CHECK(csv.rfind("tau,moment\n", 0) == 0);
    double tau = 0.0;
    double x = 0.0;
    REQUIRE(std::sscanf(csv.c_str() + csv.find('\n') + 1, "%lf,%lf", &tau, &x) == 2);
    CHECK(tau == 1.0);
    CHECK(x == doctest::Approx(0.5827482523739897).epsilon(1e-10));
    CHECK(fs::exists(dir / "m_summary.json"));
}

TEST_CASE("cli: overrides rewrite config fields from the command line") {
    const fs::path dir = fresh_dir();
    const fs::path cfg = write_config(dir, kMomentConfig);
    const int rc = run({"--config", cfg.string(), "--out", dir.string(), "-D",
                        "model.kappa=0.56", "-D", "output.prefix=ov"});
    REQUIRE(rc == 0);
    const std::string csv = slurp(dir / "ov_moment.csv");
    double tau = 0.0;
    double x = 0.0;
    REQUIRE(std::sscanf(csv.c_str() + csv.find('\n') + 1, "%lf,%lf", &tau, &x) == 2);
    CHECK(x == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("cli: repeated runs are byte-identical") {
    const fs::path dir1 = fresh_dir();
    const fs::path dir2 = fresh_dir();
    const fs::path cfg = write_config(dir1, kEvolveConfig);
    REQUIRE(run({"--config", cfg.string(), "--out", dir1.string()}) == 0);
    REQUIRE(run({"--config", cfg.string(), "--out", dir2.string()}) == 0);
    for (const char* name : {"e_density_0.csv", "e_summary.json"}) {
        const std::string a = slurp(dir1 / name);
        const std::string b = slurp(dir2 / name);
        REQUIRE(!a.empty());
        CHECK(a == b);
    }
}

TEST_CASE("cli: validation failures exit with code 1") {
    const fs::path dir = fresh_dir();

    SUBCASE("missing required field") {
        const fs::path cfg = write_config(dir, R"({
          "schema": "1", "command": "moment",
          "model": {"kappa": 0.1, "a": 1.0, "epsilon": 0.019},
          "times": [1.0], "moment": {"x_start": 1.0}})");
        CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 1);
    }
    SUBCASE("unknown section key is a typo, not a default") {
        const fs::path cfg = write_config(dir, R"({
          "schema": "1", "command": "moment",
          "model": {"alpha": 0.44, "kappa": 0.1, "a": 1.0, "epsilon": 0.019,
                    "alfa": 0.5},
          "times": [1.0], "moment": {"x_start": 1.0}})");
        CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 1);
    }
    SUBCASE("coefficient keys are checked against the declared kind") {
        std::string body = kEvolveConfig;
        body.replace(body.find("\"f_s\""), 5, "\"f0\"");
        const fs::path cfg = write_config(dir, body);
        CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 1);
    }
    SUBCASE("malformed JSON") {
        const fs::path cfg = write_config(dir, "{ not json");
        CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 1);
    }
    SUBCASE("missing file") {
        CHECK(run({"--config", (dir / "absent.json").string()}) == 1);
    }
    SUBCASE("wrong schema") {
        const fs::path cfg = write_config(dir, R"({"schema": "2", "command": "moment"})");
        CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 1);
    }
    SUBCASE("unknown command") {
        const fs::path cfg = write_config(dir, kMomentConfig);
        CHECK(run({"--config", cfg.string(), "--out", dir.string(), "--command",
                   "explode"}) == 1);
    }
}

TEST_CASE("cli: numerical failures exit with code 2") {
    const fs::path dir = fresh_dir();
    std::string body = R"({
      "schema": "1",
      "command": "evolve-fd",
      "model": {"alpha": 0.44, "kappa": 0.0, "a": 1.0, "epsilon": 0.019, "s": 0.0},
      "coefficients": {"kind": "constant", "f0": 1.0, "g0": 0.04,
                       "beta": {"mode": "constant", "value": 0.0}},
      "initial": {"mean": 0.3, "variance": 0.01},
      "grid": {"x_min": -2.0, "x_max": 2.0, "n": 801},
      "times": [0.1],
      "fd": {"scheme": "explicit", "dt": 0.01}
    })";
    const fs::path cfg = write_config(dir, body);
    CHECK(run({"--config", cfg.string(), "--out", dir.string()}) == 2);
}

TEST_CASE("cli: --command flag overrides the config") {
    const fs::path dir = fresh_dir();
    std::string body = kEvolveConfig;
    body.replace(body.find("evolve-exact"), 12, "evolve-fd");
    const fs::path cfg = write_config(dir, body);
    REQUIRE(run({"--config", cfg.string(), "--out", dir.string(), "--command",
                 "evolve-exact"}) == 0);
    const std::string summary = slurp(dir / "e_summary.json");
    CHECK(summary.find("\"evolve-exact\"") != std::string::npos);
}
