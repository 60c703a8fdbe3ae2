#include "absq/check_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absq/config.hpp"
#include "absq/decomposition.hpp"
#include "absq/diagnostics.hpp"
#include "absq/experiments.hpp"
#include "absq/inequalities.hpp"
#include "absq/kernels.hpp"

namespace absq {

using nlohmann::json;

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "grid") return Suite::grid;
  if (name == "decomposition") return Suite::decomposition;
  if (name == "inequalities") return Suite::inequalities;
  if (name == "budget") return Suite::budget;
  if (name == "all") return Suite::all;
  return std::nullopt;
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

json SuiteReport::to_json() const {
  json j;
  j["schema"] = 1;
  j["passed"] = passed();
  j["checks"] = json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"module", c.module},
                           {"passed", c.passed},
                           {"value", c.value},
                           {"threshold", c.threshold}});
  j["ensembles"] = ensembles;
  return j;
}

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

GridPtr suite_grid() { return make_grid({128, 256, 10.0}); }

void add_le(SuiteReport& rep, std::string name, std::string module, double value,
            double threshold) {
  rep.checks.push_back({std::move(name), std::move(module), value <= threshold, value, threshold});
}

double rel_max_diff(const Field& a, const Field& b) {
  const double scale = std::max(max_abs(a), 1e-300);
  return max_abs(a - b) / scale;
}

void grid_checks(SuiteReport& rep, std::size_t seeds) {
  const GridPtr g = suite_grid();
  double roundtrip = 0.0, parseval = 0.0, herm = 0.0, div = 0.0, commute = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const Field f = ensemble_field(g, s);
    const Spectrum fh = forward(f);
    roundtrip = std::max(roundtrip, rel_max_diff(f, inverse(fh)));
    const double quad = inner_product(f, f);
    parseval = std::max(parseval, std::abs(inner_product(fh, fh) - quad) / quad);
    herm = std::max(herm, hermitian_defect(fh));
    const Velocity u = velocity_from_vorticity(fh);
    div = std::max(div, spectral_divergence_max(u));
    const Spectrum a = derivative(derivative(fh, 1), 2), b = derivative(derivative(fh, 2), 1);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
      diff = std::max(diff, std::abs(a.coeffs()[i] - b.coeffs()[i]));
      scale = std::max(scale, std::abs(a.coeffs()[i]));
    }
    if (scale > 0.0) commute = std::max(commute, diff / scale);
  }
  add_le(rep, "round_trip_rel_max", "grid_spectral", roundtrip, 1e-12);
  add_le(rep, "parseval_rel", "grid_spectral", parseval, 1e-12);
  add_le(rep, "hermitian_defect", "grid_spectral", herm, 1e-13);
  add_le(rep, "streamfunction_divergence_max", "grid_spectral", div, 1e-12);
  add_le(rep, "mixed_derivative_commutation_rel", "grid_spectral", commute, 1e-15);

  const Field s1 = Field::sample(g, [](double x1, double) { return std::sin(two_pi * x1); });
  const Field c1 =
      Field::sample(g, [](double x1, double) { return two_pi * std::cos(two_pi * x1); });
  add_le(rep, "d1_sin_max_error", "grid_spectral", max_abs(inverse(derivative(forward(s1), 1)) - c1),
         1e-12);
  const Field gm = Field::sample(
      g, [](double x1, double x2) { return std::exp(-x2 * x2) * std::sin(two_pi * x1); });
  const Field d11 = inverse(derivative(forward(gm), 1, 2));
  add_le(rep, "d11_gaussian_mode_max_error", "grid_spectral",
         max_abs(d11 + (two_pi * two_pi) * gm), 1e-10);
}

void decomposition_checks(SuiteReport& rep, std::size_t seeds) {
  const GridPtr g = suite_grid();
  double pyth = 0.0, inner = 0.0, avg_d1 = 0.0, routes = 0.0, bar_u2 = 0.0, idem = 0.0,
         comm = 0.0;
  bool flagged = false;
  for (std::size_t s = 0; s < seeds; ++s) {
    const Field w = ensemble_field(g, 2 * s);
    const Field th = ensemble_field(g, 2 * s + 1);
    const Velocity u = velocity_from_vorticity(forward(w));
    const DecompositionReport d = decomposition_report(inverse(u.u1), inverse(u.u2), th);
    pyth = std::max(pyth, d.pythagoras_residual);
    inner = std::max(inner, d.bar_tilde_inner);
    bar_u2 = std::max(bar_u2, d.bar_u2_max);
    flagged |= d.flagged;

    const Spectrum th_hat = forward(th);
    const Profile a = horizontal_average(inverse(derivative(th_hat, 1)));
    avg_d1 = std::max(avg_d1, kernels::serial::max_abs(a.values));
    const Profile p1 = horizontal_average(th), p2 = horizontal_average_direct(th);
    for (std::size_t j = 0; j < p1.values.size(); ++j)
      routes = std::max(routes, std::abs(p1.values[j] - p2.values[j]));
    const Spectrum o1 = oscillation(th_hat), o2 = oscillation(o1);
    for (std::size_t i = 0; i < o1.coeffs().size(); ++i)
      idem = std::max(idem, std::abs(o1.coeffs()[i] - o2.coeffs()[i]));
    const Field c1 = oscillation(inverse(derivative(th_hat, 2)));
    const Field c2 = inverse(derivative(oscillation(th_hat), 2));
    comm = std::max(comm, max_abs(c1 - c2));
  }
  add_le(rep, "pythagoras_rel", "decomposition", pyth, 1e-11);
  add_le(rep, "bar_tilde_inner_rel", "decomposition", inner, 1e-11);
  add_le(rep, "average_of_d1_max", "decomposition", avg_d1, 1e-13);
  add_le(rep, "average_routes_agree", "decomposition", routes, 1e-13);
  add_le(rep, "bar_u2_max", "decomposition", bar_u2, 1e-12);
  add_le(rep, "oscillation_idempotent", "decomposition", idem, 0.0);
  add_le(rep, "oscillation_commutes_with_d2", "decomposition", comm, 1e-12);
  add_le(rep, "report_flagged", "decomposition", flagged ? 1.0 : 0.0, 0.0);
}

json ensemble_json(const EnsembleSummary& e) {
  return {{"count", e.count},
          {"defined", e.defined},
          {"max_ratio", e.max_ratio},
          {"argmax_seed", e.argmax_seed},
          {"median_ratio", e.median_ratio}};
}

void inequality_checks(SuiteReport& rep, std::size_t seeds) {
  const GridPtr g = suite_grid();
  for (Inequality v : all_inequalities) {
    const EnsembleSummary e = run_ensemble(v, g, 0, seeds);
    const std::string name(to_string(v));
    rep.ensembles[name] = ensemble_json(e);
    add_le(rep, name + "_max_ratio_finite", "analysis_inequalities",
           std::isfinite(e.max_ratio) && e.defined > 0 ? 0.0 : 1.0, 0.0);
    if (v == Inequality::poincare_l2)
      add_le(rep, "POINCARE_L2_max_vs_inverse_two_pi", "analysis_inequalities",
             std::abs(e.max_ratio - 1.0 / two_pi), 1e-9);
    if (v == Inequality::gg1)
      add_le(rep, "GG1_max_ratio", "analysis_inequalities", e.max_ratio, std::sqrt(2.0) + 1e-6);
    if (v == Inequality::ani || v == Inequality::an2 || v == Inequality::two_gg) {
      const EnsembleSummary other = run_ensemble(v, g, seeds, seeds);
      rep.ensembles[name]["disjoint_max_ratio"] = other.max_ratio;
      const double change =
          std::abs(other.max_ratio - e.max_ratio) / std::max(e.max_ratio, other.max_ratio);
      add_le(rep, name + "_disjoint_seed_stability", "analysis_inequalities", change, 0.2);
    }
  }
}

State random_state(GridPtr g, std::uint64_t seed) {
  ExperimentConfig c;
  c.ic = IcPreset::random;
  c.seed = seed;
  c.epsilon = 1e-2;
  c.grid = g->spec();
  return initial_state(c, g);
}

void budget_checks(SuiteReport& rep, std::size_t seeds) {
  const GridPtr g = suite_grid();
  const PhysParams p{1.0, 1.0, true};
  double vanish = 0.0, m_rel = 0.0, n_rel = 0.0, p_rel = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const State st = random_state(g, s);
    vanish = std::max(vanish, vanishing_terms(st).max_abs());
    const H1Budget b1 = h1_budget(st, p);
    const H2Budget b2 = h2_budget(st, p);
    double sm = 0.0, sn = 0.0, sp = 0.0;
    for (double x : b1.terms) sm += std::abs(x);
    for (double x : b2.n_terms) sn += std::abs(x);
    for (double x : b2.p_terms) sp += std::abs(x);
    if (sm > 0.0) m_rel = std::max(m_rel, std::abs(b1.M - b1.M_direct) / sm);
    if (sn > 0.0) n_rel = std::max(n_rel, std::abs(b2.N - b2.N_direct) / sn);
    if (sp > 0.0) p_rel = std::max(p_rel, std::abs(b2.P - b2.P_direct) / sp);
  }
  add_le(rep, "vanishing_terms_max", "diagnostics_budget", vanish, 1e-12);
  add_le(rep, "M_split_vs_direct_rel", "diagnostics_budget", m_rel, 1e-10);
  add_le(rep, "N_split_vs_direct_rel", "diagnostics_budget", n_rel, 1e-9);
  add_le(rep, "P_split_vs_direct_rel", "diagnostics_budget", p_rel, 1e-9);
}

}  // namespace

SuiteReport check_suite(Suite which, std::optional<std::size_t> seed_count) {
  SuiteReport rep;
  const std::size_t base = seed_count.value_or(100);
  const std::size_t ineq = seed_count.value_or(500);
  if (which == Suite::grid || which == Suite::all) grid_checks(rep, base);
  if (which == Suite::decomposition || which == Suite::all) decomposition_checks(rep, base);
  if (which == Suite::inequalities || which == Suite::all) inequality_checks(rep, ineq);
  if (which == Suite::budget || which == Suite::all) budget_checks(rep, base);
  return rep;
}

}  // namespace absq
