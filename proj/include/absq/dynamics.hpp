#pragma once

// Vorticity / temperature-perturbation form of the horizontally dissipative
// Boussinesq perturbation system:
//
//   d_t omega + u . grad omega = nu d11 omega + d1 theta
//   d_t theta + u . grad theta + u2 = kappa d11 theta
//   u = (-d2 psi, d1 psi),  Laplacian psi = omega
//
// The k1-diagonal dissipation is integrated exactly with an integrating
// factor; advection and the buoyancy pair are advanced with Kutta's
// three-stage third-order scheme.

#include <vector>

#include "absq/grid.hpp"

namespace absq {

struct PhysParams {
  double nu = 1.0;
  double kappa = 1.0;
  /// Toggles d1 theta in the vorticity equation and -u2 in the temperature
  /// equation together. Off only for oracle runs.
  bool buoyancy_coupling = true;
};

struct State {
  Spectrum omega_hat;
  Spectrum theta_hat;
  double t = 0.0;

  const Grid& grid() const { return omega_hat.grid(); }
  const GridPtr& grid_ptr() const { return omega_hat.grid_ptr(); }
};

inline constexpr double cfl_limit = 0.5;

struct StepperConfig {
  double dt = 1e-3;
  int output_every = 100;
};

/// Zero fields at time t.
State zero_state(GridPtr grid, double t = 0.0);
/// Transforms and dealiases physical vorticity and temperature.
State make_state(const Field& omega, const Field& theta, double t = 0.0);
/// Same, from a stream function: omega = Laplacian psi.
State state_from_streamfunction(const Field& psi, const Field& theta, double t = 0.0);

struct Velocity {
  Spectrum u1;
  Spectrum u2;
};

/// u = (-d2 psi, d1 psi) with psi from solve_streamfunction.
Velocity velocity_from_vorticity(const Spectrum& omega_hat);
Velocity velocity_from_vorticity(const State& s);
/// Scalar curl d1 u2 - d2 u1.
Spectrum curl(const Velocity& u);
/// max over modes of |i k1 u1 + i k2 u2|.
double spectral_divergence_max(const Velocity& u);

struct NonlinearRhs {
  Spectrum d_omega;
  Spectrum d_theta;
  /// max over nodes of |u1|/dx1 + |u2|/dx2; dt * this is the CFL number.
  double cfl_rate = 0.0;
};

/// Advection (dealiased products) plus the buoyancy pair; no dissipation.
NonlinearRhs nonlinear_rhs(const State& s, const PhysParams& params);

/// Time integrals over one step of ||d1 u||^2, ||d1 theta||^2 and their H^2
/// versions, from the stage quadrature of the scheme.
struct DissipationIntegrals {
  double u_l2 = 0.0;
  double theta_l2 = 0.0;
  double u_h2 = 0.0;
  double theta_h2 = 0.0;

  DissipationIntegrals& operator+=(const DissipationIntegrals& o) {
    u_l2 += o.u_l2;
    theta_l2 += o.theta_l2;
    u_h2 += o.u_h2;
    theta_h2 += o.theta_h2;
    return *this;
  }
};

/// Instantaneous ||d1 u||^2, ||d1 theta||^2, ||d1 u||_H2^2, ||d1 theta||_H2^2.
DissipationIntegrals dissipation_rates(const State& s);

struct StepReport {
  /// Largest CFL number seen by the three stages.
  double cfl = 0.0;
  bool cfl_violation = false;
  DissipationIntegrals dissipation;
  double divergence_max = 0.0;
  double bar_u2_max = 0.0;
};

/// Owns the transform workspace and the integrating factors for one dt.
/// One stepper advances one state; separate steppers may run concurrently.
class Stepper {
 public:
  Stepper(GridPtr grid, PhysParams params, StepperConfig cfg);

  const PhysParams& params() const { return params_; }
  const StepperConfig& config() const { return cfg_; }

  /// Advances `s` by dt in place. Throws NonFiniteError (with a dump of the
  /// offending state summary) if the result is not finite.
  StepReport step(State& s);

  /// Same as nonlinear_rhs() but reusing this stepper's buffers.
  void rhs(const Spectrum& omega_hat, const Spectrum& theta_hat, Spectrum& d_omega,
           Spectrum& d_theta, double& cfl_rate);

 private:
  GridPtr grid_;
  PhysParams params_;
  StepperConfig cfg_;
  std::vector<double> ef_omega_half_, ef_omega_full_, ef_theta_half_, ef_theta_full_;
  // physical work arrays
  std::vector<double> u1_, u2_, g1_, g2_, prod_;
  std::vector<cplx> work_;
};

/// Convenience: one step on a copy.
State step(const State& s, const PhysParams& params, const StepperConfig& cfg);

}  // namespace absq
