#pragma once

// Energy functional, H1/H2 budgets with their term splits, bar/tilde triple
// product splits, closure and averaged-system residuals, decay fits and
// stratification metrics.
//
// Budget quadratures use rectangle-rule sums of dealiased fields. Products of
// three fields inside the 2/3 mask are integrated exactly on the grid.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "absq/decomposition.hpp"
#include "absq/dynamics.hpp"

namespace absq {

struct StateNorms {
  double l2_u = 0.0, l2_theta = 0.0;
  double h1_u = 0.0, h1_theta = 0.0;
  double h2_u = 0.0, h2_theta = 0.0;
  /// sqrt(||u~||_H1^2 + ||theta~||_H1^2)
  double h1_osc = 0.0;
  /// ||theta~|| / ||theta||; empty when theta = 0.
  std::optional<double> osc_fraction;
};

StateNorms state_norms(const State& s);

/// max |f| over |x2| > 0.9 L relative to max |f|, worst of omega and theta.
double tail_mass(const State& s);
inline constexpr double tail_mass_threshold = 1e-8;

/// Largest coefficient in the outer fifth of the dealiased band relative to the
/// largest coefficient, worst of omega and theta.
double spectral_tail(const State& s);
inline constexpr double spectral_tail_threshold = 1e-8;

struct RecordFlags {
  bool cfl = false;
  bool divergence = false;
  bool bar_u2 = false;
  bool non_finite = false;
  /// Warnings only.
  bool tail = false;
};

inline constexpr double divergence_threshold = 1e-12;
inline constexpr double bar_u2_threshold = 1e-12;

struct DiagnosticsRecord {
  double t = 0.0;
  /// sup_{tau <= t} (||u||_H2^2 + ||theta||_H2^2) + the two dissipation integrals.
  double E = 0.0;
  StateNorms norms;
  /// nu int ||d1 u||_H2^2, kappa int ||d1 theta||_H2^2
  double diss_u_cum = 0.0, diss_theta_cum = 0.0;
  /// nu int ||d1 u||^2, kappa int ||d1 theta||^2
  double diss_u_l2_cum = 0.0, diss_theta_l2_cum = 0.0;
  /// Instantaneous nu ||d1 u||_H2^2 and kappa ||d1 theta||_H2^2.
  double rate_u_h2 = 0.0, rate_theta_h2 = 0.0;
  double bar_u2_max = 0.0;
  double div_max = 0.0;
  /// Largest CFL number over the steps since the previous record.
  double cfl = 0.0;
  double tail_mass = 0.0;
  RecordFlags flags;
};

/// Running sup of the H2 energy plus trapezoid integrals of the recorded rates.
std::vector<double> energy_functional(std::span<const DiagnosticsRecord> records);

struct H1Budget {
  /// (||omega||^2 + ||grad theta||^2) / 2
  double energy = 0.0;
  /// nu ||d1 omega||^2 + kappa ||d1 grad theta||^2
  double dissipation = 0.0;
  /// M1 + M2 + M3 + M4
  double M = 0.0;
  std::array<double, 4> terms{};
  /// -<grad P(u.grad theta), grad theta>, the independent route.
  double M_direct = 0.0;
};

struct H2Budget {
  /// (||grad omega||^2 + ||Laplacian theta||^2) / 2
  double energy = 0.0;
  /// nu ||d1 grad omega||^2 + kappa ||d1 Laplacian theta||^2
  double dissipation = 0.0;
  double N = 0.0;
  std::array<double, 4> n_terms{};
  double N_direct = 0.0;
  double P = 0.0;
  std::array<double, 6> p_terms{};
  double P_direct = 0.0;
};

H1Budget h1_budget(const State& s, const PhysParams& params);
H2Budget h2_budget(const State& s, const PhysParams& params);

/// int fbar g~ hbar, int fbar g~ h~, int f~ g~ hbar, int f~ g~ h~.
struct BarTildeSplit {
  double bb = 0.0, bt = 0.0, tb = 0.0, tt = 0.0;
  double sum() const { return bb + bt + tb + tt; }
};

BarTildeSplit bar_tilde_split(const Field& f, const Field& g, const Field& h);

/// The first (bar, bar) components of M3, N3, P1, P2, P5, P6 with the signs
/// and factors of their parent terms.
struct VanishingTerms {
  double m31 = 0.0, n31 = 0.0, p11 = 0.0, p21 = 0.0, p51 = 0.0, p61 = 0.0;
  double max_abs() const;
};

VanishingTerms vanishing_terms(const State& s);

struct ClosureResidual {
  /// centered d/dt energy + dissipation - (M or N + P), at the middle state
  double h1 = 0.0, h2 = 0.0;
  /// magnitude of the largest term in each identity, for relative reporting
  double h1_scale = 0.0, h2_scale = 0.0;
};

/// Three consecutive states at equal spacing. Throws std::invalid_argument
/// for unequal or nonpositive spacing.
ClosureResidual budget_closure(const State& prev, const State& mid, const State& next,
                               const PhysParams& params);

struct AveragedResiduals {
  /// L2 norms of the residuals of
  ///   d_t thetabar + avg(u.grad theta~) = 0
  ///   d_t u1bar + avg(u.grad u1~) = 0
  ///   d_t theta~ + (u.grad theta~)~ + u2 d2 thetabar - kappa d11 theta~ + u2~ = 0
  double theta_bar = 0.0;
  double u1_bar = 0.0;
  double theta_tilde = 0.0;
};

/// Worst residual over the interior states of an equally spaced window.
/// Throws std::invalid_argument for fewer than three states.
AveragedResiduals averaged_system_residual(std::span<const State> window,
                                           const PhysParams& params);

struct DecayWindow {
  double t0 = 1.0;
  /// Samples after t1 are ignored; infinity by default.
  double t1 = std::numeric_limits<double>::infinity();
  double floor = 1e-12;
  std::size_t min_samples = 10;
};

struct DecayFit {
  bool available = false;
  double c = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// First and last sample times used.
  double t0 = 0.0, t1 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line through (t, log v) on samples with t >= t0, t <= t1,
/// stopping at the first sample below the floor. Too few samples gives an
/// unavailable fit.
DecayFit decay_fit(std::span<const double> t, std::span<const double> v,
                   const DecayWindow& window = {});

struct StratificationMetrics {
  std::optional<double> osc_fraction;
  Profile theta_bar;
};

StratificationMetrics stratification_metrics(const State& s);

}  // namespace absq
