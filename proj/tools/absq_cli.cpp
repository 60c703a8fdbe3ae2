// absq: run experiments, invariant suites and budget post-processing.
//
//   absq run <config-or-preset>
//   absq check <grid|decomposition|inequalities|budget|all> [--seeds N]
//   absq budget <snapshot-dir>
//
// Exit codes: 0 pass, 1 invariant failure, 2 config error, 3 blow-up.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "absq/check_suite.hpp"
#include "absq/config.hpp"
#include "absq/errors.hpp"
#include "absq/experiments.hpp"

namespace {

int cmd_run(const std::string& target) {
  const absq::ExperimentConfig cfg = absq::load_config(absq::resolve_config(target));
  const absq::ExperimentOutcome out = absq::run_experiment(cfg);
  if (cfg.report_format == "csv") {
    std::ifstream ts(out.output_dir / "timeseries.csv");
    std::cout << ts.rdbuf();
  } else {
    std::cout << std::setw(2) << out.summary << '\n';
  }
  if (!out.result.failure.empty()) std::cerr << "absq: " << out.result.failure << '\n';
  std::cerr << "absq: artifacts in " << out.output_dir.string() << '\n';
  return out.exit_status;
}

int cmd_check(const std::string& suite, std::optional<std::size_t> seeds) {
  const auto which = absq::parse_suite(suite);
  if (!which) {
    std::cerr << "absq: unknown suite '" << suite
              << "' (expected grid, decomposition, inequalities, budget or all)\n";
    return absq::exit_config;
  }
  const absq::SuiteReport rep = absq::check_suite(*which, seeds);
  std::cout << std::setw(2) << rep.to_json() << '\n';
  for (const auto& c : rep.checks)
    if (!c.passed)
      std::cerr << "absq: FAILED " << c.module << '/' << c.name << " value=" << c.value
                << " threshold=" << c.threshold << '\n';
  return rep.passed() ? absq::exit_ok : absq::exit_invariant;
}

int cmd_budget(const std::filesystem::path& dir) {
  const auto rows = absq::budget_from_snapshots(dir);
  const std::filesystem::path out =
      (std::filesystem::exists(dir / "snapshots") ? dir : dir.parent_path()) / "budget.csv";
  std::ofstream os(out);
  absq::write_budget_csv(os, rows);
  std::cerr << "absq: " << rows.size() << " rows written to " << out.string() << '\n';
  return absq::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic Boussinesq pseudo-spectral simulator and verification harness"};
  app.require_subcommand(1);

  std::string run_target;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file or preset name");
  run->add_option("config", run_target, "Config file path or preset name")->required();

  std::string suite;
  std::size_t seeds = 0;
  auto* check = app.add_subcommand("check", "Run an invariant suite and print a JSON report");
  check->add_option("suite", suite, "grid, decomposition, inequalities, budget or all")
      ->required();
  auto* seeds_opt = check->add_option("--seeds", seeds, "Number of seeds per ensemble");

  std::string budget_dir;
  auto* budget = app.add_subcommand("budget", "Evaluate budget terms over a snapshot directory");
  budget->add_option("snapshot-dir", budget_dir, "Run directory or its snapshots/")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : absq::exit_config;
  }

  try {
    if (*run) return cmd_run(run_target);
    if (*check)
      return cmd_check(suite, *seeds_opt ? std::optional<std::size_t>(seeds) : std::nullopt);
    if (*budget) return cmd_budget(budget_dir);
  } catch (const absq::ConfigError& e) {
    std::cerr << "absq: " << e.what() << '\n';
    return absq::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "absq: error: " << e.what() << '\n';
    return absq::exit_invariant;
  }
  return absq::exit_ok;
}
