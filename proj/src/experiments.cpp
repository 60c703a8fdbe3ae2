#include "absq/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "absq/errors.hpp"
#include "absq/inequalities.hpp"
#include "absq/snapshot.hpp"

namespace absq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double envelope(double x2, double sigma) {
  return sigma > 0.0 ? std::exp(-(x2 / sigma) * (x2 / sigma)) : 1.0;
}

std::string step_name(const char* kind, long step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08ld.bin", kind, step);
  return buf;
}

}  // namespace

InitialData initial_data(const ExperimentConfig& c, GridPtr grid) {
  const double sigma = c.sigma;
  switch (c.ic) {
    case IcPreset::gaussian_pair:
      return {Field::sample(grid,
                            [&](double x1, double x2) {
                              return envelope(x2, sigma) * (0.5 + std::sin(two_pi * x1));
                            }),
              Field::sample(grid, [&](double x1, double x2) {
                return envelope(x2 - 0.5, sigma) * (1.0 + std::cos(two_pi * x1 + 0.3));
              })};
    case IcPreset::single_mode: {
      const double k1 = two_pi * c.mode_m1;
      const double k2 = M_PI * c.mode_m2 / grid->half_width();
      return {Field(grid), Field::sample(grid, [&](double x1, double x2) {
                return envelope(x2, sigma) * std::sin(k1 * x1 + k2 * x2);
              })};
    }
    case IcPreset::random:
      return {random_field(grid, {2 * c.seed, 4, sigma}),
              random_field(grid, {2 * c.seed + 1, 4, sigma})};
  }
  throw std::logic_error("initial_data: unknown preset");
}

State initial_state(const ExperimentConfig& c, GridPtr grid) {
  const InitialData d = initial_data(c, grid);
  State s = state_from_streamfunction(d.psi, d.theta);
  const StateNorms n = state_norms(s);
  const double size = n.h2_u + n.h2_theta;
  const double scale = size > 0.0 ? c.epsilon / size : 0.0;
  s.omega_hat *= scale;
  s.theta_hat *= scale;
  return s;
}

fs::path output_dir_for(const ExperimentConfig& c) {
  if (const char* env = std::getenv("ABSQ_OUTPUT_DIR"); env && *env) return fs::path(env) / c.name;
  if (!c.output_dir.empty()) return c.output_dir;
  return fs::path("out") / c.name;
}

void write_timeseries_csv(std::ostream& os, std::span<const DiagnosticsRecord> records) {
  os << "t,E,l2_u,l2_theta,h1_osc,h2_u,h2_theta,diss_u_cum,diss_theta_cum,bar_u2_max,"
        "tail_mass,cfl,h1_u,h1_theta,diss_u_l2_cum,diss_theta_l2_cum,div_max,osc_fraction\n";
  os << std::setprecision(17);
  for (const auto& r : records) {
    const auto& n = r.norms;
    os << r.t << ',' << r.E << ',' << n.l2_u << ',' << n.l2_theta << ',' << n.h1_osc << ','
       << n.h2_u << ',' << n.h2_theta << ',' << r.diss_u_cum << ',' << r.diss_theta_cum << ','
       << r.bar_u2_max << ',' << r.tail_mass << ',' << r.cfl << ',' << n.h1_u << ','
       << n.h1_theta << ',' << r.diss_u_l2_cum << ',' << r.diss_theta_l2_cum << ',' << r.div_max
       << ',';
    if (n.osc_fraction) os << *n.osc_fraction;
    os << '\n';
  }
}

ExperimentOutcome run_experiment(const ExperimentConfig& c, bool write_artifacts) {
  ExperimentOutcome out;
  GridPtr grid;
  try {
    grid = make_grid(c.grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", 0, e.what());
  }
  const State init = initial_state(c, grid);

  out.output_dir = output_dir_for(c);
  const fs::path snap_dir = out.output_dir / "snapshots";
  std::ofstream index;
  if (write_artifacts) {
    fs::create_directories(out.output_dir);
    std::ofstream params(out.output_dir / "params.cfg");
    write_config(params, c);
    if (c.snapshot_every > 0) {
      fs::create_directories(snap_dir);
      index.open(snap_dir / "index.csv");
      index << "step,t,omega,theta\n" << std::setprecision(17);
    }
  }

  // theta-bar profiles at every record, for the stratification metrics
  std::vector<std::pair<double, Profile>> profiles;

  RunOptions opts;
  opts.T = c.T;
  opts.snapshot_every = write_artifacts ? c.snapshot_every : 0;
  opts.on_snapshot = [&](const State& s, long step) {
    const std::string wn = step_name("omega", step), tn = step_name("theta", step);
    write_snapshot(snap_dir / wn, inverse(s.omega_hat), PayloadKind::omega);
    write_snapshot(snap_dir / tn, inverse(s.theta_hat), PayloadKind::theta);
    index << step << ',' << s.t << ',' << wn << ',' << tn << '\n';
  };
  opts.on_record = [&](const DiagnosticsRecord& r, const State& s) {
    profiles.emplace_back(r.t, stratification_metrics(s).theta_bar);
  };

  out.result = run(init, c.phys, c.stepper, opts);
  const RunResult& res = out.result;
  const auto& recs = res.records;

  // decay fit of the oscillation H1 norm
  std::vector<double> ts, hs;
  for (const auto& r : recs) {
    ts.push_back(r.t);
    hs.push_back(r.norms.h1_osc);
  }
  out.fit = decay_fit(ts, hs, {c.fit_t0, std::numeric_limits<double>::infinity(), c.fit_floor});

  const auto& r0 = recs.front();
  const double h1_pair0 = std::hypot(r0.norms.h1_u, r0.norms.h1_theta);
  double bound_worst = 0.0;
  bool bound_holds = out.fit.available;
  if (out.fit.available) {
    for (const auto& r : recs) {
      if (r.t < out.fit.t0 || r.t > out.fit.t1) continue;
      const double ratio = r.norms.h1_osc / (h1_pair0 * std::exp(-out.fit.c * r.t));
      bound_worst = std::max(bound_worst, ratio);
    }
    bound_holds = bound_worst <= 1.0;
  }

  // L2 balance and energy functional
  auto l2e = [](const DiagnosticsRecord& r) {
    return r.norms.l2_u * r.norms.l2_u + r.norms.l2_theta * r.norms.l2_theta;
  };
  const double e0 = l2e(r0);
  double balance = 0.0, e_sup = 0.0;
  for (const auto& r : recs) {
    if (e0 > 0.0)
      balance = std::max(
          balance, std::abs(l2e(r) - e0 + 2.0 * (r.diss_u_l2_cum + r.diss_theta_l2_cum)) / e0);
    e_sup = std::max(e_sup, r.E);
  }

  // stratification
  std::optional<double> below_time;
  for (const auto& r : recs)
    if (r.norms.osc_fraction && *r.norms.osc_fraction < 1e-3) {
      below_time = r.t;
      break;
    }
  double drift = 0.0;
  const double t_end = recs.back().t;
  for (std::size_t k = 1; k < profiles.size(); ++k) {
    if (profiles[k].first < 0.9 * t_end) continue;
    Profile d = profiles[k].second;
    for (std::size_t j = 0; j < d.values.size(); ++j) d.values[j] -= profiles[k - 1].second.values[j];
    drift = std::max(drift, l2_norm(d));
  }

  // status
  const RecordFlags& f = res.flags;
  if (res.status != RunStatus::completed)
    out.exit_status = exit_blowup;
  else if (f.cfl || f.divergence || f.bar_u2 || f.non_finite)
    out.exit_status = exit_invariant;

  json warnings = json::array();
  if (f.tail) warnings.push_back("tail_mass above 1e-8 (domain truncation monitor)");
  if (!out.fit.available) warnings.push_back("decay fit unavailable: fewer than 10 usable samples");
  if (res.initial_size > c.epsilon * (1.0 + 1e-12) + 1e-300)
    warnings.push_back("initial H2 size exceeds epsilon");

  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json& s = out.summary;
  s["schema"] = 1;
  s["preset"] = c.name;
  s["epsilon"] = c.epsilon;
  s["epsilon_initial"] = res.initial_size;
  s["nu"] = c.phys.nu;
  s["kappa"] = c.phys.kappa;
  s["buoyancy_coupling"] = c.phys.buoyancy_coupling;
  s["dt"] = c.stepper.dt;
  s["T"] = c.T;
  s["steps"] = res.steps;
  s["t_final"] = t_end;
  s["E0"] = r0.E;
  s["E_sup_over_E0"] = r0.E > 0.0 ? json(e_sup / r0.E) : json(nullptr);
  s["l2_balance_max_rel"] = balance;
  s["decay"] = {{"available", out.fit.available},
                {"c", out.fit.c},
                {"intercept", out.fit.intercept},
                {"r_squared", out.fit.r_squared},
                {"t0", out.fit.t0},
                {"t1", out.fit.t1},
                {"samples", out.fit.samples}};
  s["decay_bound"] = {{"holds", bound_holds}, {"worst_ratio", bound_worst}, {"h1_initial", h1_pair0}};
  s["final_osc_fraction"] = opt(recs.back().norms.osc_fraction);
  s["osc_fraction_below_1e-3_at"] = opt(below_time);
  s["theta_bar_drift_last_10pct"] = drift;
  s["flags"] = {{"cfl", f.cfl},
                {"divergence", f.divergence},
                {"bar_u2", f.bar_u2},
                {"non_finite", f.non_finite},
                {"tail_mass", f.tail}};
  s["warnings"] = warnings;
  s["failure"] = res.failure;
  s["exit_status"] = out.exit_status;

  if (write_artifacts) {
    std::ofstream ts_csv(out.output_dir / "timeseries.csv");
    write_timeseries_csv(ts_csv, recs);
    std::ofstream sj(out.output_dir / "summary.json");
    sj << std::setw(2) << s << '\n';
    write_profile_csv(out.output_dir / "theta_bar.csv", profiles.back().second);
  }
  return out;
}

// ---------------------------------------------------------------- budget

namespace {

struct IndexEntry {
  long step;
  double t;
  std::string omega, theta;
};

std::vector<IndexEntry> read_index(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("budget: cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("step,t,omega,theta", 0) != 0)
    throw std::runtime_error("budget: unexpected index header in " + file.string());
  std::vector<IndexEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, w, th;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, w, ',') ||
        !std::getline(ss, th))
      throw std::runtime_error("budget: malformed index line '" + line + "'");
    out.push_back({std::stol(a), std::stod(b), w, th});
  }
  return out;
}

}  // namespace

std::vector<BudgetRow> budget_from_snapshots(const fs::path& dir) {
  fs::path snap = dir;
  if (!fs::exists(snap / "index.csv") && fs::exists(dir / "snapshots" / "index.csv"))
    snap = dir / "snapshots";
  fs::path cfg_path;
  for (const fs::path& p : {snap / "params.cfg", snap.parent_path() / "params.cfg"})
    if (fs::is_regular_file(p)) {
      cfg_path = p;
      break;
    }
  if (cfg_path.empty()) throw ConfigError("", 0, "budget: no params.cfg next to " + snap.string());
  const ExperimentConfig c = load_config(cfg_path);
  const GridPtr grid = make_grid(c.grid);

  const auto entries = read_index(snap / "index.csv");
  std::vector<State> states;
  for (const auto& e : entries) {
    const Snapshot w = read_snapshot(snap / e.omega, grid);
    const Snapshot th = read_snapshot(snap / e.theta, grid);
    states.push_back(make_state(w.field, th.field, e.t));
  }

  std::vector<BudgetRow> rows(states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(states.size()); ++k) {
    BudgetRow& row = rows[k];
    const State& s = states[k];
    row.t = s.t;
    row.h1 = h1_budget(s, c.phys);
    row.h2 = h2_budget(s, c.phys);
    row.vanishing = vanishing_terms(s);
    if (k > 0 && k + 1 < static_cast<std::ptrdiff_t>(states.size())) {
      row.closure = budget_closure(states[k - 1], s, states[k + 1], c.phys);
      row.averaged =
          averaged_system_residual(std::span<const State>(states).subspan(k - 1, 3), c.phys);
    }
  }
  return rows;
}

void write_budget_csv(std::ostream& os, std::span<const BudgetRow> rows) {
  os << "t,h1_energy,h1_dissipation,M,M1,M2,M3,M4,M_direct,"
        "h2_energy,h2_dissipation,N,N1,N2,N3,N4,N_direct,P,P1,P2,P3,P4,P5,P6,P_direct,"
        "M31,N31,P11,P21,P51,P61,h1_closure,h1_scale,h2_closure,h2_scale,"
        "theta_bar_residual,u1_bar_residual,theta_tilde_residual\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.h1.energy << ',' << r.h1.dissipation << ',' << r.h1.M;
    for (double m : r.h1.terms) os << ',' << m;
    os << ',' << r.h1.M_direct << ',' << r.h2.energy << ',' << r.h2.dissipation << ',' << r.h2.N;
    for (double n : r.h2.n_terms) os << ',' << n;
    os << ',' << r.h2.N_direct << ',' << r.h2.P;
    for (double p : r.h2.p_terms) os << ',' << p;
    os << ',' << r.h2.P_direct;
    const auto& v = r.vanishing;
    os << ',' << v.m31 << ',' << v.n31 << ',' << v.p11 << ',' << v.p21 << ',' << v.p51 << ','
       << v.p61;
    if (r.closure)
      os << ',' << r.closure->h1 << ',' << r.closure->h1_scale << ',' << r.closure->h2 << ','
         << r.closure->h2_scale;
    else
      os << ",,,,";
    if (r.averaged)
      os << ',' << r.averaged->theta_bar << ',' << r.averaged->u1_bar << ','
         << r.averaged->theta_tilde;
    else
      os << ",,,";
    os << '\n';
  }
}

}  // namespace absq
