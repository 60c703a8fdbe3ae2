#pragma once

// Experiment drivers behind the CLI: initial data, runs with on-disk
// artifacts and summary, and budget post-processing of snapshot directories.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "absq/config.hpp"
#include "absq/run.hpp"

namespace absq {

enum ExitCode : int { exit_ok = 0, exit_invariant = 1, exit_config = 2, exit_blowup = 3 };

/// Stream function and temperature before scaling.
struct InitialData {
  Field psi;
  Field theta;
};

InitialData initial_data(const ExperimentConfig& c, GridPtr grid);

/// Dealiased initial state scaled so that ||u0||_H2 + ||theta0||_H2 = epsilon.
State initial_state(const ExperimentConfig& c, GridPtr grid);

struct ExperimentOutcome {
  int exit_status = exit_ok;
  RunResult result;
  DecayFit fit;
  nlohmann::json summary;
  std::filesystem::path output_dir;
};

/// Output directory: $ABSQ_OUTPUT_DIR/<name> if the variable is set, else
/// c.output_dir, else out/<name>.
std::filesystem::path output_dir_for(const ExperimentConfig& c);

/// Runs the experiment. With write_artifacts the directory receives
/// timeseries.csv, summary.json, theta_bar.csv, params.cfg and, when
/// snapshot_every > 0, snapshots/ with index.csv.
ExperimentOutcome run_experiment(const ExperimentConfig& c, bool write_artifacts = true);

/// The time-series CSV, header first.
void write_timeseries_csv(std::ostream& os, std::span<const DiagnosticsRecord> records);

struct BudgetRow {
  double t = 0.0;
  H1Budget h1;
  H2Budget h2;
  VanishingTerms vanishing;
  /// Empty at the first and last snapshot.
  std::optional<ClosureResidual> closure;
  std::optional<AveragedResiduals> averaged;
};

/// Reads <dir>/snapshots/index.csv (or <dir>/index.csv) and params.cfg from
/// <dir> or its parent, and evaluates every budget term per snapshot.
std::vector<BudgetRow> budget_from_snapshots(const std::filesystem::path& dir);
void write_budget_csv(std::ostream& os, std::span<const BudgetRow> rows);

}  // namespace absq
