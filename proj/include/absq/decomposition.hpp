#pragma once

// Horizontal average / oscillation split f = fbar(x2) + ftilde(x1, x2).
//
// The split is taken in coefficient space: fbar is the m1 = 0 column of the
// spectrum, ftilde is everything else. That makes orthogonality and
// idempotence exact on the grid.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "absq/grid.hpp"

namespace absq {

/// A function of x2 alone, sampled on the x2 nodes.
struct Profile {
  GridPtr grid;
  std::vector<double> values;
};

Spectrum horizontal_average(const Spectrum& s);
Spectrum oscillation(const Spectrum& s);

/// fbar from the m1 = 0 Fourier slice.
Profile horizontal_average(const Field& f);
/// fbar as the rectangle-rule mean over each x1 line (cross-check route).
Profile horizontal_average_direct(const Field& f);
Field oscillation(const Field& f);

/// The x1-constant field whose every x1 line equals the profile.
Field broadcast(const Profile& p);
/// Norm of the profile viewed as a function on Omega (the x1 box has length 1).
double l2_norm(const Profile& p);

struct DecompositionReport {
  double div_bar_max = 0.0;
  double div_tilde_max = 0.0;
  double bar_u2_max = 0.0;
  /// max over u1, u2, theta of |(fbar, ftilde)| / ||f||^2 (0 for a zero field).
  double bar_tilde_inner = 0.0;
  /// max over u1, u2, theta of |‖f‖² - ‖fbar‖² - ‖ftilde‖²| / ‖f‖².
  double pythagoras_residual = 0.0;
  bool flagged = false;
};

inline constexpr double decomposition_flag_threshold = 1e-8;

/// Checks the structural properties of the split for a velocity/temperature state.
/// Violations above 1e-8 set `flagged`; nothing throws.
DecompositionReport decomposition_report(const Field& u1, const Field& u2, const Field& theta);

/// Two-column CSV "x2,value".
void write_profile_csv(std::ostream& os, const Profile& p);
void write_profile_csv(const std::filesystem::path& path, const Profile& p);

}  // namespace absq
