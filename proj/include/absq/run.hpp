#pragma once

// Time loop: steps a state to the horizon, emitting a DiagnosticsRecord every
// output_every steps and at the end, tracking invariant flags and blow-up.

#include <functional>
#include <string>
#include <vector>

#include "absq/diagnostics.hpp"
#include "absq/dynamics.hpp"

namespace absq {

inline constexpr double blowup_factor = 1e6;

struct RunOptions {
  double T = 1.0;
  /// Snapshot callback cadence in steps; 0 disables.
  int snapshot_every = 0;
  std::function<void(const State&, long step)> on_snapshot;
  std::function<void(const DiagnosticsRecord&, const State&)> on_record;
};

enum class RunStatus { completed, blow_up, non_finite };

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  State final_state;
  RunStatus status = RunStatus::completed;
  /// Labeled failure message for blow-up or non-finite aborts.
  std::string failure;
  /// ||u0||_H2 + ||theta0||_H2, the smallness quantity.
  double initial_size = 0.0;
  long steps = 0;
  /// OR of the per-record flags.
  RecordFlags flags;
};

/// Deterministic for fixed inputs. Does not throw on blow-up or non-finite
/// states; those end the run with the corresponding status.
RunResult run(const State& initial, const PhysParams& params, const StepperConfig& cfg,
              const RunOptions& options);

/// Builds the record for a state from the accumulated step data.
DiagnosticsRecord make_record(const State& s, const PhysParams& params,
                              const DissipationIntegrals& cumulative, double h2_sup,
                              const StepReport& worst_step);

}  // namespace absq
