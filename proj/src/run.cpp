#include "absq/run.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "absq/errors.hpp"

namespace absq {

DiagnosticsRecord make_record(const State& s, const PhysParams& params,
                              const DissipationIntegrals& cumulative, double h2_sup,
                              const StepReport& worst_step) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.norms = state_norms(s);
  r.diss_u_cum = params.nu * cumulative.u_h2;
  r.diss_theta_cum = params.kappa * cumulative.theta_h2;
  r.diss_u_l2_cum = params.nu * cumulative.u_l2;
  r.diss_theta_l2_cum = params.kappa * cumulative.theta_l2;
  const DissipationIntegrals rate = dissipation_rates(s);
  r.rate_u_h2 = params.nu * rate.u_h2;
  r.rate_theta_h2 = params.kappa * rate.theta_h2;
  const double h2 = r.norms.h2_u * r.norms.h2_u + r.norms.h2_theta * r.norms.h2_theta;
  r.E = std::max(h2_sup, h2) + r.diss_u_cum + r.diss_theta_cum;
  r.bar_u2_max = worst_step.bar_u2_max;
  r.div_max = worst_step.divergence_max;
  r.cfl = worst_step.cfl;
  r.tail_mass = tail_mass(s);

  r.flags.cfl = r.cfl > cfl_limit;
  r.flags.divergence = r.div_max > divergence_threshold;
  r.flags.bar_u2 = r.bar_u2_max > bar_u2_threshold;
  r.flags.tail = r.tail_mass > tail_mass_threshold;
  const auto& n = r.norms;
  for (double v : {n.l2_u, n.l2_theta, n.h2_u, n.h2_theta, n.h1_osc, r.E})
    if (!std::isfinite(v)) r.flags.non_finite = true;
  return r;
}

namespace {

void merge(RecordFlags& into, const RecordFlags& f) {
  into.cfl |= f.cfl;
  into.divergence |= f.divergence;
  into.bar_u2 |= f.bar_u2;
  into.non_finite |= f.non_finite;
  into.tail |= f.tail;
}

void merge(StepReport& into, const StepReport& s) {
  into.cfl = std::max(into.cfl, s.cfl);
  into.divergence_max = std::max(into.divergence_max, s.divergence_max);
  into.bar_u2_max = std::max(into.bar_u2_max, s.bar_u2_max);
}

/// Divergence and bar-u2 of the initial state, as the stepper reports them.
StepReport initial_report(const State& s) {
  StepReport rep;
  const Velocity v = velocity_from_vorticity(s);
  rep.divergence_max = spectral_divergence_max(v);
  for (int r = 0; r < s.grid().n2(); ++r)
    rep.bar_u2_max = std::max(rep.bar_u2_max, std::abs(v.u2.at(0, r)));
  return rep;
}

}  // namespace

RunResult run(const State& initial, const PhysParams& params, const StepperConfig& cfg,
              const RunOptions& options) {
  Stepper stepper(initial.grid_ptr(), params, cfg);
  RunResult res;
  res.final_state = initial;
  State& s = res.final_state;

  const long nsteps = std::max(0L, std::lround(options.T / cfg.dt));
  DissipationIntegrals cumulative;
  double h2_sup = 0.0;

  auto emit = [&](const StepReport& worst) {
    DiagnosticsRecord r = make_record(s, params, cumulative, h2_sup, worst);
    h2_sup = std::max(h2_sup, r.norms.h2_u * r.norms.h2_u + r.norms.h2_theta * r.norms.h2_theta);
    merge(res.flags, r.flags);
    if (options.on_record) options.on_record(r, s);
    res.records.push_back(r);
    return res.records.back();
  };

  const DiagnosticsRecord& first = emit(initial_report(s));
  res.initial_size = first.norms.h2_u + first.norms.h2_theta;
  const double limit = blowup_factor * res.initial_size;
  if (options.on_snapshot && options.snapshot_every > 0) options.on_snapshot(s, 0);

  StepReport worst;
  for (long n = 1; n <= nsteps; ++n) {
    StepReport rep;
    try {
      rep = stepper.step(s);
    } catch (const NonFiniteError& e) {
      res.status = RunStatus::non_finite;
      res.failure = e.what();
      res.flags.non_finite = true;
      res.steps = n - 1;
      return res;
    }
    cumulative += rep.dissipation;
    merge(worst, rep);
    res.steps = n;

    if (options.on_snapshot && options.snapshot_every > 0 && n % options.snapshot_every == 0)
      options.on_snapshot(s, n);

    if (n % cfg.output_every == 0 || n == nsteps) {
      const DiagnosticsRecord& r = emit(worst);
      worst = StepReport{};
      const double size = r.norms.h2_u + r.norms.h2_theta;
      if (res.initial_size > 0.0 && !(size <= limit)) {
        std::ostringstream msg;
        msg << "blow-up at t=" << r.t << ": ||u||_H2+||theta||_H2=" << size << " exceeds "
            << blowup_factor << " x initial " << res.initial_size;
        res.status = RunStatus::blow_up;
        res.failure = msg.str();
        return res;
      }
    }
  }
  return res;
}

}  // namespace absq
