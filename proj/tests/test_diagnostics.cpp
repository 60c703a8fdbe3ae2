#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "absq/diagnostics.hpp"
#include "absq/inequalities.hpp"

using namespace absq;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

GridPtr small() { return make_grid({32, 64, 5.0}); }

State random_state(GridPtr g, std::uint64_t seed, double amp = 0.1) {
  return make_state(amp * ensemble_field(g, 2 * seed), amp * ensemble_field(g, 2 * seed + 1));
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// States at t0 - h, t0, t0 + h from a fine reference integration.
std::array<State, 3> triple(const State& s0, const PhysParams& p, double t0, double h) {
  const double dt = 1e-4;
  Stepper st(s0.grid_ptr(), p, {dt, 100});
  State s = s0;
  auto to = [&](double t) {
    while (s.t < t - 0.5 * dt) st.step(s);
    return s;
  };
  const State a = to(t0 - h), b = to(t0), c = to(t0 + h);
  return {a, b, c};
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("decay fit recovers a known exponent") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
      t.push_back(0.05 * i);
      v.push_back(2.0 * std::exp(-3.0 * t.back()));
    }
    const DecayFit f = decay_fit(t, v);
    REQUIRE(f.available);
    CHECK(std::abs(f.c - 3.0) <= 1e-10);
    CHECK(std::abs(f.intercept - std::log(2.0)) <= 1e-10);
    CHECK(f.r_squared >= 1.0 - 1e-12);
    CHECK(f.t0 == doctest::Approx(1.0));

    const std::vector<double> flat(t.size(), 0.5);
    const DecayFit g = decay_fit(t, flat);
    REQUIRE(g.available);
    CHECK(std::abs(g.c) <= 1e-14);
  }

  TEST_CASE("decay fit stops at the floor and needs enough samples") {
    std::vector<double> t, v;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(i);
      v.push_back(std::exp(-2.0 * i));
    }
    // exp(-2 t) < 1e-12 from t = 14 on
    const DecayFit f = decay_fit(t, v);
    REQUIRE(f.available);
    CHECK(f.t1 == 13.0);
    CHECK(f.samples == 13);
    CHECK(std::abs(f.c - 2.0) <= 1e-10);

    const DecayFit few = decay_fit(t, v, {.t0 = 1.0, .t1 = 5.0});
    CHECK_FALSE(few.available);
  }

  TEST_CASE("energy functional is a running sup plus trapezoid integrals") {
    std::vector<DiagnosticsRecord> recs(4);
    const double h2[] = {1.0, 2.0, 1.5, 0.5};
    for (int i = 0; i < 4; ++i) {
      recs[i].t = i;
      recs[i].norms.h2_u = h2[i];
      recs[i].rate_u_h2 = 1.0;
      recs[i].rate_theta_h2 = double(i);
    }
    const std::vector<double> e = energy_functional(recs);
    // sup: 1, 4, 4, 4; integral of 1 + t: 0, 1.5, 4, 7.5
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(5.5));
    CHECK(e[2] == doctest::Approx(8.0));
    CHECK(e[3] == doctest::Approx(11.5));
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] >= e[i - 1]);
  }

  TEST_CASE("budgets without velocity") {
    auto g = small();
    const Field th = Field::sample(g, [](double x1, double x2) { return std::sin(two_pi * x1) * std::exp(-x2 * x2); });
    const State s = make_state(Field(g), th);
    const PhysParams p{1.0, 0.5, true};
    const H1Budget b1 = h1_budget(s, p);
    CHECK(b1.M == 0.0);
    CHECK(b1.M_direct == 0.0);
    const Spectrum d1 = derivative(s.theta_hat, 1), d2 = derivative(s.theta_hat, 2);
    CHECK(rel(b1.energy, 0.5 * (inner_product(d1, d1) + inner_product(d2, d2))) <= 1e-13);
    const Spectrum d11 = derivative(s.theta_hat, 1, 2), d12 = mixed_derivative(s.theta_hat, 1, 1);
    CHECK(rel(b1.dissipation, 0.5 * (inner_product(d11, d11) + inner_product(d12, d12))) <= 1e-13);

    const H2Budget b2 = h2_budget(s, p);
    CHECK(b2.N == 0.0);
    CHECK(b2.P == 0.0);
    const Spectrum lap = laplacian(s.theta_hat);
    CHECK(rel(b2.energy, 0.5 * inner_product(lap, lap)) <= 1e-13);
  }

  TEST_CASE("bar/tilde splits") {
    auto g = small();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Field f = ensemble_field(g, 3 * seed) + Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
      const Field gg = ensemble_field(g, 3 * seed + 1);
      const Field h = ensemble_field(g, 3 * seed + 2) + Field::sample(g, [](double, double x2) { return x2 * std::exp(-x2 * x2); });
      const BarTildeSplit sp = bar_tilde_split(f, gg, h);
      const double whole = triple_product(f, oscillation(gg), h);
      CHECK(std::abs(sp.sum() - whole) <= 1e-12 * std::max(1.0, std::abs(whole)));
      CHECK(std::abs(sp.bb) <= 1e-14);
    }
  }

  TEST_CASE("term sums agree with the direct routes") {
    auto g = small();
    const PhysParams p{1.0, 1.0, true};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const State s = random_state(g, seed, 1.0);
      const H1Budget b1 = h1_budget(s, p);
      const H2Budget b2 = h2_budget(s, p);
      double m = 0.0, sm = 0.0, sn = 0.0, sp = 0.0;
      for (double v : b1.terms) m += v, sm += std::abs(v);
      for (double v : b2.n_terms) sn += std::abs(v);
      for (double v : b2.p_terms) sp += std::abs(v);
      CHECK(rel(m, b1.M) <= 1e-14);
      CHECK(std::abs(b1.M - b1.M_direct) <= 1e-10 * sm);
      CHECK(std::abs(b2.N - b2.N_direct) <= 1e-9 * sn);
      CHECK(std::abs(b2.P - b2.P_direct) <= 1e-9 * sp);

      const VanishingTerms z = vanishing_terms(s);
      CHECK(z.max_abs() <= 1e-12);
    }
  }

  TEST_CASE("budget closure residual is second order in the spacing") {
    auto g = small();
    const State s0 = random_state(g, 9, 0.5);
    const PhysParams p{0.5, 0.5, true};
    const auto a = triple(s0, p, 0.1, 0.02);
    const auto b = triple(s0, p, 0.1, 0.01);
    const ClosureResidual ra = budget_closure(a[0], a[1], a[2], p);
    const ClosureResidual rb = budget_closure(b[0], b[1], b[2], p);
    const double q1 = std::abs(ra.h1 / rb.h1), q2 = std::abs(ra.h2 / rb.h2);
    CHECK(q1 >= 3.5);
    CHECK(q1 <= 4.5);
    CHECK(q2 >= 3.5);
    CHECK(q2 <= 4.5);

    CHECK_THROWS_AS(budget_closure(a[0], a[1], b[2], p), std::invalid_argument);
  }

  TEST_CASE("averaged residuals vanish on x1-independent data") {
    auto g = small();
    const Field w = Field::sample(g, [](double, double x2) { return x2 * std::exp(-x2 * x2); });
    const Field th = Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
    std::vector<State> win;
    for (int i = 0; i < 3; ++i) win.push_back(make_state(w, th, 0.1 * i));
    const AveragedResiduals r = averaged_system_residual(win, {1.0, 1.0, true});
    CHECK(r.theta_bar <= 1e-10);
    CHECK(r.u1_bar <= 1e-10);
    CHECK(r.theta_tilde <= 1e-10);
    CHECK_THROWS_AS(averaged_system_residual(std::span<const State>(win).first(2), {1.0, 1.0, true}),
                    std::invalid_argument);
  }

  TEST_CASE("averaged residuals are small along a trajectory") {
    auto g = small();
    const State s0 = random_state(g, 4, 0.5);
    const PhysParams p{0.5, 0.5, true};
    const auto big = triple(s0, p, 0.1, 0.01);
    const auto fine = triple(s0, p, 0.1, 0.005);
    const AveragedResiduals a = averaged_system_residual(big, p);
    const AveragedResiduals b = averaged_system_residual(fine, p);
    CHECK(a.theta_tilde / b.theta_tilde >= 3.0);
    CHECK(a.theta_bar / b.theta_bar >= 3.0);
  }

  TEST_CASE("norms and stratification metrics") {
    auto g = small();
    const Field th = Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
    const State s = make_state(Field(g), th);
    const StateNorms n = state_norms(s);
    CHECK(n.l2_u == 0.0);
    REQUIRE(n.osc_fraction);
    CHECK(*n.osc_fraction <= 1e-15);
    CHECK(n.h1_osc <= 1e-14);
    const StratificationMetrics m = stratification_metrics(s);
    REQUIRE(m.osc_fraction);
    CHECK(l2_norm(m.theta_bar) == doctest::Approx(l2_norm(th)).epsilon(1e-12));

    CHECK_FALSE(state_norms(zero_state(g)).osc_fraction);
    CHECK(tail_mass(s) <= 1e-8);
  }
}
