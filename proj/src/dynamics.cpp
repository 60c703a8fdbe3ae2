#include "absq/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "absq/errors.hpp"
#include "absq/kernels.hpp"

namespace absq {

namespace {

inline cplx times_i(double a, cplx z) { return {-a * z.imag(), a * z.real()}; }

// Derivative multipliers with the odd-order Nyquist convention of derivative().
struct Multipliers {
  std::vector<double> d1, d2, inv_ksq;
};

Multipliers multipliers(const Grid& g) {
  Multipliers m;
  const std::size_t n = g.spectral_size();
  m.d1.resize(n);
  m.d2.resize(n);
  m.inv_ksq.resize(n);
  for (int r = 0; r < g.n2(); ++r)
    for (int c = 0; c < g.nc(); ++c) {
      const std::size_t i = g.index(c, r);
      m.d1[i] = g.nyquist1(c) ? 0.0 : g.k1()[i];
      m.d2[i] = g.nyquist2(r) ? 0.0 : g.k2()[i];
      m.inv_ksq[i] = i == 0 ? 0.0 : 1.0 / g.ksq()[i];
    }
  return m;
}

const Multipliers& cached_multipliers(const Grid& g) {
  // Keyed on the grid object; steppers and diagnostics for one grid share it.
  thread_local const Grid* key = nullptr;
  thread_local Multipliers cache;
  if (key != &g || cache.d1.size() != g.spectral_size()) {
    cache = multipliers(g);
    key = &g;
  }
  return cache;
}

bool all_finite(std::span<const cplx> v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double max_coeff(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

State zero_state(GridPtr grid, double t) {
  State s{Spectrum(grid), Spectrum(grid), t};
  return s;
}

State make_state(const Field& omega, const Field& theta, double t) {
  require_same_grid(omega.grid(), theta.grid());
  return State{dealias(forward(omega)), dealias(forward(theta)), t};
}

State state_from_streamfunction(const Field& psi, const Field& theta, double t) {
  require_same_grid(psi.grid(), theta.grid());
  return State{dealias(laplacian(forward(psi))), dealias(forward(theta)), t};
}

Velocity velocity_from_vorticity(const Spectrum& omega_hat) {
  const Spectrum psi = solve_streamfunction(omega_hat);
  return {-1.0 * derivative(psi, 2), derivative(psi, 1)};
}

Velocity velocity_from_vorticity(const State& s) { return velocity_from_vorticity(s.omega_hat); }

Spectrum curl(const Velocity& u) { return derivative(u.u2, 1) - derivative(u.u1, 2); }

double spectral_divergence_max(const Velocity& u) {
  const Spectrum div = derivative(u.u1, 1) + derivative(u.u2, 2);
  return max_coeff(div.coeffs());
}

NonlinearRhs nonlinear_rhs(const State& s, const PhysParams& params) {
  Stepper stepper(s.grid_ptr(), params, StepperConfig{});
  NonlinearRhs out{Spectrum(s.grid_ptr()), Spectrum(s.grid_ptr()), 0.0};
  stepper.rhs(s.omega_hat, s.theta_hat, out.d_omega, out.d_theta, out.cfl_rate);
  return out;
}

DissipationIntegrals dissipation_rates(const State& s) {
  const Grid& g = s.grid();
  const auto& m = cached_multipliers(g);
  const auto mult = g.multiplicity();
  const auto ksq = g.ksq();
  const auto w = s.omega_hat.coeffs();
  const auto th = s.theta_hat.coeffs();
  const auto rows = static_cast<std::size_t>(g.n2());
  const auto cols = static_cast<std::size_t>(g.nc());
  auto u_sq = [&](std::size_t i) {
    const double f = m.inv_ksq[i];
    return (m.d1[i] * m.d1[i] + m.d2[i] * m.d2[i]) * f * f * std::norm(w[i]);
  };
  DissipationIntegrals r;
  r.u_l2 = kernels::row_ordered_sum(rows, cols, [&](std::size_t i) {
    return mult[i] * m.d1[i] * m.d1[i] * u_sq(i);
  });
  r.theta_l2 = kernels::row_ordered_sum(rows, cols, [&](std::size_t i) {
    return mult[i] * m.d1[i] * m.d1[i] * std::norm(th[i]);
  });
  r.u_h2 = kernels::row_ordered_sum(rows, cols, [&](std::size_t i) {
    const double h = (1.0 + ksq[i]) * (1.0 + ksq[i]);
    return mult[i] * h * m.d1[i] * m.d1[i] * u_sq(i);
  });
  r.theta_h2 = kernels::row_ordered_sum(rows, cols, [&](std::size_t i) {
    const double h = (1.0 + ksq[i]) * (1.0 + ksq[i]);
    return mult[i] * h * m.d1[i] * m.d1[i] * std::norm(th[i]);
  });
  const double a = g.area();
  r.u_l2 *= a;
  r.theta_l2 *= a;
  r.u_h2 *= a;
  r.theta_h2 *= a;
  return r;
}

// ---------------------------------------------------------------- Stepper

Stepper::Stepper(GridPtr grid, PhysParams params, StepperConfig cfg)
    : grid_(std::move(grid)), params_(params), cfg_(cfg) {
  if (!(params_.nu >= 0.0) || !(params_.kappa >= 0.0) || !std::isfinite(params_.nu) ||
      !std::isfinite(params_.kappa))
    throw std::invalid_argument("stepper: nu and kappa must be finite and nonnegative");
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
  if (cfg_.output_every < 1) throw std::invalid_argument("stepper: output_every must be >= 1");

  const Grid& g = *grid_;
  const std::size_t ns = g.spectral_size();
  ef_omega_half_.resize(ns);
  ef_omega_full_.resize(ns);
  ef_theta_half_.resize(ns);
  ef_theta_full_.resize(ns);
  const auto k1 = g.k1();
  for (std::size_t i = 0; i < ns; ++i) {
    const double k1sq = k1[i] * k1[i];
    ef_omega_half_[i] = std::exp(-params_.nu * k1sq * 0.5 * cfg_.dt);
    ef_omega_full_[i] = std::exp(-params_.nu * k1sq * cfg_.dt);
    ef_theta_half_[i] = std::exp(-params_.kappa * k1sq * 0.5 * cfg_.dt);
    ef_theta_full_[i] = std::exp(-params_.kappa * k1sq * cfg_.dt);
  }
  u1_.resize(g.size());
  u2_.resize(g.size());
  g1_.resize(g.size());
  g2_.resize(g.size());
  prod_.resize(g.size());
  work_.resize(ns);
}

void Stepper::rhs(const Spectrum& omega_hat, const Spectrum& theta_hat, Spectrum& d_omega,
                  Spectrum& d_theta, double& cfl_rate) {
  const Grid& g = *grid_;
  const auto& m = cached_multipliers(g);
  const auto mask = g.dealias_mask();
  const std::size_t ns = g.spectral_size();
  const auto w = omega_hat.coeffs();
  const auto th = theta_hat.coeffs();
  const double norm = 1.0 / static_cast<double>(g.size());

  auto to_physical = [&](auto&& coeff, std::vector<double>& out) {
    for (std::size_t i = 0; i < ns; ++i) work_[i] = coeff(i);
    g.execute_c2r(work_.data(), out.data());
  };

  to_physical([&](std::size_t i) { return times_i(m.d2[i] * m.inv_ksq[i], w[i]); }, u1_);
  to_physical([&](std::size_t i) { return times_i(-m.d1[i] * m.inv_ksq[i], w[i]); }, u2_);

  const double inv_dx1 = 1.0 / g.dx1(), inv_dx2 = 1.0 / g.dx2();
  double rate = 0.0;
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for reduction(max : rate) schedule(static)
  for (std::ptrdiff_t i = 0; i < np; ++i)
    rate = std::max(rate, std::abs(u1_[i]) * inv_dx1 + std::abs(u2_[i]) * inv_dx2);
  cfl_rate = rate;

  const bool coupled = params_.buoyancy_coupling;
  auto advect_into = [&](std::span<const cplx> q, Spectrum& out) {
    to_physical([&](std::size_t i) { return times_i(m.d1[i], q[i]); }, g1_);
    to_physical([&](std::size_t i) { return times_i(m.d2[i], q[i]); }, g2_);
    kernels::advection(u1_, u2_, g1_, g2_, prod_);
    g.execute_r2c(prod_.data(), out.coeffs().data());
    for (std::size_t i = 0; i < ns; ++i) out.coeffs()[i] *= -norm;
  };

  advect_into(w, d_omega);
  advect_into(th, d_theta);
  auto dw = d_omega.coeffs();
  auto dt = d_theta.coeffs();
  for (std::size_t i = 0; i < ns; ++i) {
    if (!mask[i]) {
      dw[i] = 0.0;
      dt[i] = 0.0;
      continue;
    }
    if (coupled) {
      dw[i] += times_i(m.d1[i], th[i]);
      // -u2 with u2 = -i k1 omega / |k|^2
      dt[i] += times_i(m.d1[i] * m.inv_ksq[i], w[i]);
    }
  }
}

StepReport Stepper::step(State& s) {
  const Grid& g = *grid_;
  require_same_grid(g, s.grid());
  const kernels::FlushDenormals ftz;
  const double h = cfg_.dt;
  const std::size_t ns = g.spectral_size();

  Spectrum k1w(grid_), k1t(grid_), k2w(grid_), k2t(grid_), k3w(grid_), k3t(grid_);
  Spectrum aw(grid_), at(grid_), bw(grid_), bt(grid_);
  StepReport rep;
  double rate = 0.0;

  auto w0 = s.omega_hat.coeffs();
  auto t0 = s.theta_hat.coeffs();
  const DissipationIntegrals r0 = dissipation_rates(s);

  rhs(s.omega_hat, s.theta_hat, k1w, k1t, rate);
  rep.cfl = std::max(rep.cfl, rate * h);
  for (std::size_t i = 0; i < ns; ++i) {
    aw.coeffs()[i] = ef_omega_half_[i] * (w0[i] + 0.5 * h * k1w.coeffs()[i]);
    at.coeffs()[i] = ef_theta_half_[i] * (t0[i] + 0.5 * h * k1t.coeffs()[i]);
  }
  const DissipationIntegrals ra = dissipation_rates(State{aw, at, s.t + 0.5 * h});

  rhs(aw, at, k2w, k2t, rate);
  rep.cfl = std::max(rep.cfl, rate * h);
  for (std::size_t i = 0; i < ns; ++i) {
    bw.coeffs()[i] = ef_omega_full_[i] * (w0[i] - h * k1w.coeffs()[i]) +
                     2.0 * h * ef_omega_half_[i] * k2w.coeffs()[i];
    bt.coeffs()[i] = ef_theta_full_[i] * (t0[i] - h * k1t.coeffs()[i]) +
                     2.0 * h * ef_theta_half_[i] * k2t.coeffs()[i];
  }
  const DissipationIntegrals rb = dissipation_rates(State{bw, bt, s.t + h});

  rhs(bw, bt, k3w, k3t, rate);
  rep.cfl = std::max(rep.cfl, rate * h);
  for (std::size_t i = 0; i < ns; ++i) {
    w0[i] = ef_omega_full_[i] * w0[i] +
            h * (ef_omega_full_[i] * k1w.coeffs()[i] / 6.0 +
                 2.0 * ef_omega_half_[i] * k2w.coeffs()[i] / 3.0 + k3w.coeffs()[i] / 6.0);
    t0[i] = ef_theta_full_[i] * t0[i] +
            h * (ef_theta_full_[i] * k1t.coeffs()[i] / 6.0 +
                 2.0 * ef_theta_half_[i] * k2t.coeffs()[i] / 3.0 + k3t.coeffs()[i] / 6.0);
  }
  s.t += h;

  if (!all_finite(w0) || !all_finite(t0)) {
    std::ostringstream msg;
    msg << "non-finite state after step to t=" << s.t << " (dt=" << h << ", nu=" << params_.nu
        << ", kappa=" << params_.kappa << "); pre-step max|omega_hat|=" << max_coeff(aw.coeffs())
        << ", stage CFL=" << rep.cfl;
    throw NonFiniteError(msg.str());
  }

  rep.cfl_violation = rep.cfl > cfl_limit;
  rep.dissipation.u_l2 = h * (r0.u_l2 + 4.0 * ra.u_l2 + rb.u_l2) / 6.0;
  rep.dissipation.theta_l2 = h * (r0.theta_l2 + 4.0 * ra.theta_l2 + rb.theta_l2) / 6.0;
  rep.dissipation.u_h2 = h * (r0.u_h2 + 4.0 * ra.u_h2 + rb.u_h2) / 6.0;
  rep.dissipation.theta_h2 = h * (r0.theta_h2 + 4.0 * ra.theta_h2 + rb.theta_h2) / 6.0;

  const auto& m = cached_multipliers(g);
  double div = 0.0, bar = 0.0;
  for (int r = 0; r < g.n2(); ++r)
    for (int c = 0; c < g.nc(); ++c) {
      const std::size_t i = g.index(c, r);
      const cplx u1 = times_i(m.d2[i] * m.inv_ksq[i], w0[i]);
      const cplx u2 = times_i(-m.d1[i] * m.inv_ksq[i], w0[i]);
      div = std::max(div, std::abs(times_i(m.d1[i], u1) + times_i(m.d2[i], u2)));
      if (c == 0) bar = std::max(bar, std::abs(u2));
    }
  rep.divergence_max = div;
  rep.bar_u2_max = bar;
  return rep;
}

State step(const State& s, const PhysParams& params, const StepperConfig& cfg) {
  Stepper stepper(s.grid_ptr(), params, cfg);
  State out = s;
  stepper.step(out);
  return out;
}

}  // namespace absq
