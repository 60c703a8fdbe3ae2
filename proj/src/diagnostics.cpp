#include "absq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "absq/inequalities.hpp"
#include "absq/kernels.hpp"

namespace absq {

namespace {

Field times(const Field& a, const Field& b) {
  Field out(a.grid_ptr());
  kernels::product(a.values(), b.values(), out.values());
  return out;
}

double triple(const Field& f, const Field& g, const Field& h) {
  return f.grid().cell_area() *
         kernels::triple_sum(f.values(), g.values(), h.values(),
                             static_cast<std::size_t>(f.grid().n1()));
}

/// P(a1 * b1 + a2 * b2)
Spectrum dealiased_advection(const Field& a1, const Field& a2, const Field& b1, const Field& b2) {
  Field out(a1.grid_ptr());
  kernels::advection(a1.values(), a2.values(), b1.values(), b2.values(), out.values());
  return dealias(forward(out));
}

double sq(double x) { return x * x; }

/// Physical fields shared by the budgets.
struct Fields {
  Spectrum u1h, u2h;
  Field u1, u2;
  Field d1u1, d2u1, d1u2, d2u2;
  Field d1w, d2w;
  Field d1t, d2t;
};

Fields make_fields(const State& s) {
  const Velocity v = velocity_from_vorticity(s);
  Fields f{v.u1,
           v.u2,
           inverse(v.u1),
           inverse(v.u2),
           inverse(derivative(v.u1, 1)),
           inverse(derivative(v.u1, 2)),
           inverse(derivative(v.u2, 1)),
           inverse(derivative(v.u2, 2)),
           inverse(derivative(s.omega_hat, 1)),
           inverse(derivative(s.omega_hat, 2)),
           inverse(derivative(s.theta_hat, 1)),
           inverse(derivative(s.theta_hat, 2))};
  return f;
}

Field bar_field(const Field& f) { return broadcast(horizontal_average(f)); }

}  // namespace

// ---------------------------------------------------------------- norms

StateNorms state_norms(const State& s) {
  StateNorms n;
  const Velocity v = velocity_from_vorticity(s);
  auto pair = [](const Spectrum& a, const Spectrum& b, double k) {
    return std::sqrt(sq(sobolev_norm(a, k)) + sq(sobolev_norm(b, k)));
  };
  n.l2_u = pair(v.u1, v.u2, 0.0);
  n.h1_u = pair(v.u1, v.u2, 1.0);
  n.h2_u = pair(v.u1, v.u2, 2.0);
  n.l2_theta = sobolev_norm(s.theta_hat, 0.0);
  n.h1_theta = sobolev_norm(s.theta_hat, 1.0);
  n.h2_theta = sobolev_norm(s.theta_hat, 2.0);

  const Spectrum tt = oscillation(s.theta_hat);
  n.h1_osc = std::sqrt(sq(pair(oscillation(v.u1), oscillation(v.u2), 1.0)) +
                       sq(sobolev_norm(tt, 1.0)));
  if (n.l2_theta > 0.0) n.osc_fraction = std::min(1.0, l2_norm(tt) / n.l2_theta);
  return n;
}

double tail_mass(const State& s) {
  const Grid& g = s.grid();
  const double edge = 0.9 * g.half_width();
  double worst = 0.0;
  for (const Spectrum* sp : {&s.omega_hat, &s.theta_hat}) {
    const Field f = inverse(*sp);
    const double peak = max_abs(f);
    if (peak == 0.0) continue;
    double tail = 0.0;
    for (int j = 0; j < g.n2(); ++j) {
      if (std::abs(g.x2_nodes()[j]) <= edge) continue;
      for (int i = 0; i < g.n1(); ++i) tail = std::max(tail, std::abs(f.at(i, j)));
    }
    worst = std::max(worst, tail / peak);
  }
  return worst;
}

double spectral_tail(const State& s) {
  const Grid& g = s.grid();
  const double cut1 = g.spec().dealias_fraction * g.n1() / 2.0;
  const double cut2 = g.spec().dealias_fraction * g.n2() / 2.0;
  double worst = 0.0;
  for (const Spectrum* sp : {&s.omega_hat, &s.theta_hat}) {
    double peak = 0.0, tail = 0.0;
    for (int r = 0; r < g.n2(); ++r)
      for (int c = 0; c < g.nc(); ++c) {
        const double a = std::abs(sp->at(c, r));
        peak = std::max(peak, a);
        if (std::abs(g.m1_of(c)) > 0.8 * cut1 || std::abs(g.m2_of(r)) > 0.8 * cut2)
          tail = std::max(tail, a);
      }
    if (peak > 0.0) worst = std::max(worst, tail / peak);
  }
  return worst;
}

std::vector<double> energy_functional(std::span<const DiagnosticsRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  double sup = 0.0, integral = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    sup = std::max(sup, sq(r.norms.h2_u) + sq(r.norms.h2_theta));
    if (i > 0) {
      const auto& p = records[i - 1];
      integral += 0.5 * (r.t - p.t) *
                  (r.rate_u_h2 + r.rate_theta_h2 + p.rate_u_h2 + p.rate_theta_h2);
    }
    out.push_back(sup + integral);
  }
  return out;
}

// ---------------------------------------------------------------- budgets

H1Budget h1_budget(const State& s, const PhysParams& params) {
  H1Budget b;
  const Fields f = make_fields(s);
  const Spectrum d1t = derivative(s.theta_hat, 1), d2t = derivative(s.theta_hat, 2);

  b.energy = 0.5 * (inner_product(s.omega_hat, s.omega_hat) + inner_product(d1t, d1t) +
                    inner_product(d2t, d2t));
  const Spectrum d1w = derivative(s.omega_hat, 1);
  const Spectrum d11t = derivative(s.theta_hat, 1, 2), d12t = mixed_derivative(s.theta_hat, 1, 1);
  b.dissipation = params.nu * inner_product(d1w, d1w) +
                  params.kappa * (inner_product(d11t, d11t) + inner_product(d12t, d12t));

  b.terms[0] = -triple(f.d1u1, f.d1t, f.d1t);
  b.terms[1] = -triple(f.d1u2, f.d2t, f.d1t);
  b.terms[2] = -triple(f.d2u1, f.d1t, f.d2t);
  b.terms[3] = -triple(f.d2u2, f.d2t, f.d2t);
  b.M = b.terms[0] + b.terms[1] + b.terms[2] + b.terms[3];

  const Spectrum adv = dealiased_advection(f.u1, f.u2, f.d1t, f.d2t);
  b.M_direct = -(inner_product(derivative(adv, 1), d1t) + inner_product(derivative(adv, 2), d2t));
  return b;
}

H2Budget h2_budget(const State& s, const PhysParams& params) {
  H2Budget b;
  const Fields f = make_fields(s);
  const Spectrum w1 = derivative(s.omega_hat, 1), w2 = derivative(s.omega_hat, 2);
  const Spectrum lt = laplacian(s.theta_hat);

  b.energy = 0.5 * (inner_product(w1, w1) + inner_product(w2, w2) + inner_product(lt, lt));
  const Spectrum w11 = derivative(s.omega_hat, 1, 2), w12 = mixed_derivative(s.omega_hat, 1, 1);
  const Spectrum lt1 = derivative(lt, 1);
  b.dissipation = params.nu * (inner_product(w11, w11) + inner_product(w12, w12)) +
                  params.kappa * inner_product(lt1, lt1);

  b.n_terms[0] = -triple(f.d1u1, f.d1w, f.d1w);
  b.n_terms[1] = -triple(f.d1u2, f.d1w, f.d2w);
  b.n_terms[2] = -triple(f.d2u1, f.d1w, f.d2w);
  b.n_terms[3] = -triple(f.d2u2, f.d2w, f.d2w);
  b.N = b.n_terms[0] + b.n_terms[1] + b.n_terms[2] + b.n_terms[3];

  const Field lap_t = inverse(lt);
  const Field lap_u1 = inverse(laplacian(f.u1h));
  const Field lap_u2 = inverse(laplacian(f.u2h));
  const Field t11 = inverse(derivative(s.theta_hat, 1, 2));
  const Field t12 = inverse(mixed_derivative(s.theta_hat, 1, 1));
  const Field t22 = inverse(derivative(s.theta_hat, 2, 2));
  b.p_terms[0] = -triple(lap_u1, f.d1t, lap_t);
  b.p_terms[1] = -triple(lap_u2, f.d2t, lap_t);
  b.p_terms[2] = -2.0 * triple(f.d1u1, t11, lap_t);
  b.p_terms[3] = -2.0 * triple(f.d1u2, t12, lap_t);
  b.p_terms[4] = -2.0 * triple(f.d2u1, t12, lap_t);
  b.p_terms[5] = -2.0 * triple(f.d2u2, t22, lap_t);
  b.P = 0.0;
  for (double p : b.p_terms) b.P += p;

  const Spectrum adv_w = dealiased_advection(f.u1, f.u2, f.d1w, f.d2w);
  b.N_direct = -(inner_product(derivative(adv_w, 1), w1) + inner_product(derivative(adv_w, 2), w2));
  const Spectrum adv_t = dealiased_advection(f.u1, f.u2, f.d1t, f.d2t);
  b.P_direct = -inner_product(laplacian(adv_t), lt);
  return b;
}

BarTildeSplit bar_tilde_split(const Field& f, const Field& g, const Field& h) {
  require_same_grid(f.grid(), g.grid());
  require_same_grid(f.grid(), h.grid());
  const Field fb = bar_field(f), hb = bar_field(h);
  const Field ft = oscillation(f), gt = oscillation(g), ht = oscillation(h);
  return {triple(fb, gt, hb), triple(fb, gt, ht), triple(ft, gt, hb), triple(ft, gt, ht)};
}

double VanishingTerms::max_abs() const {
  return std::max({std::abs(m31), std::abs(n31), std::abs(p11), std::abs(p21), std::abs(p51),
                   std::abs(p61)});
}

VanishingTerms vanishing_terms(const State& s) {
  const Fields f = make_fields(s);
  const Field lap_t = inverse(laplacian(s.theta_hat));
  const Field lap_u1 = inverse(laplacian(f.u1h));
  const Field t12 = inverse(mixed_derivative(s.theta_hat, 1, 1));
  const Field t22 = inverse(derivative(s.theta_hat, 2, 2));
  VanishingTerms v;
  v.m31 = -bar_tilde_split(f.d2u1, f.d1t, f.d2t).bb;
  v.n31 = -bar_tilde_split(f.d2u1, f.d1w, f.d2w).bb;
  v.p11 = -bar_tilde_split(lap_u1, f.d1t, lap_t).bb;
  // Laplacian u2 = d1 omega
  v.p21 = -bar_tilde_split(f.d2t, f.d1w, lap_t).bb;
  v.p51 = -2.0 * bar_tilde_split(f.d2u1, t12, lap_t).bb;
  // d2 u2 = -d1 u1
  v.p61 = 2.0 * bar_tilde_split(t22, f.d1u1, lap_t).bb;
  return v;
}

// ---------------------------------------------------------------- residuals

namespace {

double check_spacing(const State& a, const State& b, const State& c) {
  const double h1 = b.t - a.t, h2 = c.t - b.t;
  if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * std::max(h1, h2))
    throw std::invalid_argument("residual: states must be equally spaced in increasing time");
  return 0.5 * (h1 + h2);
}

}  // namespace

ClosureResidual budget_closure(const State& prev, const State& mid, const State& next,
                               const PhysParams& params) {
  const double h = check_spacing(prev, mid, next);
  const H1Budget a1 = h1_budget(prev, params), b1 = h1_budget(mid, params),
                 c1 = h1_budget(next, params);
  const H2Budget a2 = h2_budget(prev, params), b2 = h2_budget(mid, params),
                 c2 = h2_budget(next, params);
  ClosureResidual r;
  const double rate1 = (c1.energy - a1.energy) / (2.0 * h);
  const double rate2 = (c2.energy - a2.energy) / (2.0 * h);
  r.h1 = rate1 + b1.dissipation - b1.M;
  r.h2 = rate2 + b2.dissipation - (b2.N + b2.P);
  r.h1_scale = std::max({std::abs(rate1), std::abs(b1.dissipation), std::abs(b1.M)});
  r.h2_scale = std::max({std::abs(rate2), std::abs(b2.dissipation), std::abs(b2.N + b2.P)});
  return r;
}

AveragedResiduals averaged_system_residual(std::span<const State> window,
                                           const PhysParams& params) {
  if (window.size() < 3)
    throw std::invalid_argument("averaged_system_residual: need at least three states");
  AveragedResiduals worst;
  for (std::size_t k = 1; k + 1 < window.size(); ++k) {
    const State& a = window[k - 1];
    const State& s = window[k];
    const State& c = window[k + 1];
    const double h = check_spacing(a, s, c);

    const Fields f = make_fields(s);
    const Spectrum tt = oscillation(s.theta_hat);
    const Spectrum tb = horizontal_average(s.theta_hat);
    const Field d1tt = inverse(derivative(tt, 1)), d2tt = inverse(derivative(tt, 2));

    // theta bar
    const Spectrum adv_tt = dealiased_advection(f.u1, f.u2, d1tt, d2tt);
    const Spectrum dtb =
        (1.0 / (2.0 * h)) * (horizontal_average(c.theta_hat) - horizontal_average(a.theta_hat));
    const double r_tb = l2_norm(dtb + horizontal_average(adv_tt));

    // u1 bar
    const Spectrum u1t = oscillation(f.u1h);
    const Field d1u1t = inverse(derivative(u1t, 1)), d2u1t = inverse(derivative(u1t, 2));
    const Spectrum adv_u = dealiased_advection(f.u1, f.u2, d1u1t, d2u1t);
    const Spectrum u1a = velocity_from_vorticity(a.omega_hat).u1;
    const Spectrum u1c = velocity_from_vorticity(c.omega_hat).u1;
    const Spectrum du1b =
        (1.0 / (2.0 * h)) * (horizontal_average(u1c) - horizontal_average(u1a));
    const double r_ub = l2_norm(du1b + horizontal_average(adv_u));

    // theta tilde
    const Field d2tb = inverse(derivative(tb, 2));
    Spectrum rhs = oscillation(adv_tt) + dealias(forward(times(f.u2, d2tb)));
    rhs -= params.kappa * derivative(tt, 1, 2);
    if (params.buoyancy_coupling) rhs += oscillation(f.u2h);
    const Spectrum dtt =
        (1.0 / (2.0 * h)) * (oscillation(c.theta_hat) - oscillation(a.theta_hat));
    const double r_tt = l2_norm(dtt + rhs);

    worst.theta_bar = std::max(worst.theta_bar, r_tb);
    worst.u1_bar = std::max(worst.u1_bar, r_ub);
    worst.theta_tilde = std::max(worst.theta_tilde, r_tt);
  }
  return worst;
}

// ---------------------------------------------------------------- fits

DecayFit decay_fit(std::span<const double> t, std::span<const double> v,
                   const DecayWindow& window) {
  if (t.size() != v.size()) throw std::invalid_argument("decay_fit: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t0) continue;
    if (t[i] > window.t1) break;
    if (!(v[i] >= window.floor)) break;
    xs.push_back(t[i]);
    ys.push_back(std::log(v[i]));
  }
  DecayFit fit;
  fit.samples = xs.size();
  if (xs.size() < std::max<std::size_t>(window.min_samples, 2)) return fit;

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += sq(xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += sq(ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  const double slope = sxy / sxx;
  fit.available = true;
  fit.c = -slope;
  fit.intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    ss_res += sq(ys[i] - (fit.intercept + slope * xs[i]));
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t0 = xs.front();
  fit.t1 = xs.back();
  return fit;
}

StratificationMetrics stratification_metrics(const State& s) {
  StratificationMetrics m;
  const double total = l2_norm(s.theta_hat);
  if (total > 0.0) m.osc_fraction = std::min(1.0, l2_norm(oscillation(s.theta_hat)) / total);
  m.theta_bar = horizontal_average(inverse(s.theta_hat));
  return m;
}

}  // namespace absq
