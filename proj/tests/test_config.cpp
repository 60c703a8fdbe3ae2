#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "absq/check_suite.hpp"
#include "absq/config.hpp"
#include "absq/errors.hpp"
#include "absq/experiments.hpp"

using namespace absq;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("absq_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parse, defaults and round trip") {
    const ExperimentConfig c = parse(
        "# comment\n"
        "name = probe\n"
        "n1 = 32   # trailing\n"
        "n2 = 64\n"
        "half_width = 4\n"
        "nu = 0.5\n"
        "buoyancy_coupling = false\n"
        "ic_preset = random(7)\n"
        "sigma = 0.5\n");
    CHECK(c.name == "probe");
    CHECK(c.grid.n1 == 32);
    CHECK(c.phys.nu == 0.5);
    CHECK(c.phys.kappa == 1.0);
    CHECK_FALSE(c.phys.buoyancy_coupling);
    CHECK(c.ic == IcPreset::random);
    CHECK(c.seed == 7);

    std::ostringstream os;
    write_config(os, c);
    const ExperimentConfig d = parse(os.str());
    CHECK(d.name == c.name);
    CHECK(d.grid.n2 == c.grid.n2);
    CHECK(d.grid.half_width == c.grid.half_width);
    CHECK(d.phys.nu == c.phys.nu);
    CHECK(d.phys.buoyancy_coupling == c.phys.buoyancy_coupling);
    CHECK(d.ic == c.ic);
    CHECK(d.seed == c.seed);
    CHECK(d.sigma == c.sigma);
    CHECK(d.stepper.dt == c.stepper.dt);
  }

  TEST_CASE("errors carry the line") {
    CHECK(error_line("name = a\nbogus = 1\n") == 2);
    CHECK(error_line("n1 = 7\n") == 1);
    CHECK(error_line("\n\ndt = -1\n") == 3);
    CHECK(error_line("nu = abc\n") == 1);
    CHECK(error_line("ic_preset = spiral\n") == 1);
    CHECK(error_line("no equals sign\n") == 1);
    CHECK(error_line("sigma = 100\n") >= 0);
    CHECK_THROWS_AS(parse("ic_preset = single_mode\nmode_m1 = 1000\n"), ConfigError);
    CHECK_NOTHROW(parse("ic_preset = single_mode\nsigma = 0\n"));
  }

  TEST_CASE("every shipped preset parses") {
    for (const char* name : {"zero", "heat_oracle", "linear_mode_oracle", "inviscid_conservation",
                             "theorem1_smalldata", "theorem2_smalldata", "stratification_long"}) {
      const ExperimentConfig c = load_config(resolve_config(name));
      CHECK(c.name == name);
    }
    CHECK_THROWS_AS(resolve_config("no_such_preset"), ConfigError);
  }

  TEST_CASE("initial data is scaled to epsilon") {
    ExperimentConfig c = parse("n1 = 32\nn2 = 64\nhalf_width = 6\nepsilon = 0.02\n");
    auto g = make_grid(c.grid);
    const StateNorms n = state_norms(initial_state(c, g));
    CHECK(n.h2_u + n.h2_theta == doctest::Approx(0.02).epsilon(1e-12));

    c.epsilon = 0.0;
    const StateNorms z = state_norms(initial_state(c, g));
    CHECK(z.h2_u + z.h2_theta == 0.0);
  }

  TEST_CASE("run_experiment writes its artifacts") {
    const fs::path dir = scratch("run");
    ExperimentConfig c = parse(
        "name = small\nn1 = 16\nn2 = 32\nhalf_width = 4\nsigma = 0.5\n"
        "dt = 1e-3\nT = 0.02\noutput_every = 5\nsnapshot_every = 10\n");
    c.output_dir = dir;
    ::unsetenv("ABSQ_OUTPUT_DIR");
    const ExperimentOutcome out = run_experiment(c);
    CHECK(out.exit_status == exit_ok);
    CHECK(out.output_dir == dir);
    for (const char* f : {"timeseries.csv", "summary.json", "theta_bar.csv", "params.cfg", "snapshots/index.csv"})
      CHECK(fs::exists(dir / f));
    CHECK(out.summary["schema"] == 1);
    CHECK(out.summary["steps"] == 20);

    std::ifstream ts(dir / "timeseries.csv");
    std::string header;
    std::getline(ts, header);
    CHECK(header.rfind("t,E,", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(ts, line);) ++rows;
    CHECK(rows == 5);

    const std::vector<BudgetRow> rows_b = budget_from_snapshots(dir);
    REQUIRE(rows_b.size() == 3);
    CHECK_FALSE(rows_b.front().closure);
    CHECK(rows_b[1].closure);
    CHECK(rows_b[1].vanishing.max_abs() <= 1e-12);
    fs::remove_all(dir);
  }

  TEST_CASE("output directory override") {
    ExperimentConfig c;
    c.name = "abc";
    ::setenv("ABSQ_OUTPUT_DIR", "/tmp/somewhere", 1);
    CHECK(output_dir_for(c) == fs::path("/tmp/somewhere/abc"));
    ::unsetenv("ABSQ_OUTPUT_DIR");
    CHECK(output_dir_for(c) == fs::path("out/abc"));
  }

  TEST_CASE("suite names") {
    CHECK(parse_suite("grid") == Suite::grid);
    CHECK(parse_suite("all") == Suite::all);
    CHECK_FALSE(parse_suite("bogus"));
    const SuiteReport r = check_suite(Suite::decomposition, 3);
    CHECK(r.passed());
    CHECK(r.to_json().contains("checks"));
  }
}
