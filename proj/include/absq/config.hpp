#pragma once

// Experiment configuration: flat "key = value" text, '#' starts a comment.
//
//   n1 n2 half_width dealias_fraction dt T nu kappa epsilon output_every
//   snapshot_every buoyancy_coupling ic_preset seed sigma mode_m1 mode_m2
//   fit_t0 fit_floor report_format name output_dir
//
// ic_preset is gaussian_pair, single_mode, random or random(<seed>).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "absq/dynamics.hpp"
#include "absq/grid.hpp"

namespace absq {

enum class IcPreset { gaussian_pair, single_mode, random };

struct ExperimentConfig {
  std::string name = "custom";
  GridSpec grid;
  PhysParams phys;
  StepperConfig stepper;
  double T = 1.0;
  /// Target for ||u0||_H2 + ||theta0||_H2.
  double epsilon = 1e-2;
  IcPreset ic = IcPreset::gaussian_pair;
  std::uint64_t seed = 0;
  /// x2 envelope width exp(-(x2/sigma)^2); 0 means no envelope (single_mode only).
  double sigma = 1.0;
  int mode_m1 = 1;
  int mode_m2 = 0;
  int snapshot_every = 0;
  double fit_t0 = 1.0;
  double fit_floor = 1e-12;
  /// csv or json; selects the format printed to stdout by the CLI.
  std::string report_format = "json";
  /// Empty means out/<name>.
  std::filesystem::path output_dir;
};

/// Throws ConfigError with key and line on unknown keys, malformed values or
/// values violating the grid / stepper invariants.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every key so that parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ExperimentConfig& c);

std::string to_string(IcPreset p);

/// Directory holding the shipped presets: $ABSQ_PRESET_DIR if set, else the
/// source tree location compiled in.
std::filesystem::path preset_dir();

/// A path that exists is used as is; otherwise `name` or `name.cfg` is looked
/// up in preset_dir(). Throws ConfigError if nothing matches.
std::filesystem::path resolve_config(const std::string& name_or_path);

}  // namespace absq
