#include <doctest.h>

#include <cmath>
#include <numbers>

#include "absq/decomposition.hpp"
#include "absq/inequalities.hpp"

using namespace absq;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

GridPtr desk() { return make_grid({128, 256, 10.0}); }

}  // namespace

TEST_SUITE("inequalities") {
  TEST_CASE("Sobolev norms") {
    auto g = desk();
    CHECK(sobolev_norm(Field(g), 2.0) == 0.0);
    const Field s = Field::sample(g, [](double x1, double) { return std::sin(two_pi * x1); });
    // ||sin(2 pi x1)||^2 = |Omega| / 2 = L
    CHECK(sobolev_norm(s, 0.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK(sobolev_norm(s, 1.0) == doctest::Approx(std::sqrt(10.0 * (1 + 4 * pi * pi))).epsilon(1e-14));
    CHECK(std::abs(sobolev_norm(s, 0.0) - l2_norm(s)) <= 1e-12);
    CHECK_THROWS_AS(sobolev_norm(s, -1.0), std::invalid_argument);
  }

  TEST_CASE("H2 norm sits between derivative sums with fixed factors") {
    // (1+|k|^2)^2 = 1 + 2|k|^2 + |k|^4 and sum_{|a|=2} |k^a|^2 = |k|^4 up to the
    // factor 2 on the mixed term: quadrature Q = ||f||^2 + ||grad f||^2 + ||D^2 f||^2
    // satisfies Q <= ||f||_H2^2 <= 2 Q.
    auto g = desk();
    const Field f = ensemble_field(g, 21);
    const Spectrum fh = forward(f);
    auto sq = [](double x) { return x * x; };
    const double q = sq(l2_norm(f)) + sq(l2_norm(inverse(derivative(fh, 1)))) +
                     sq(l2_norm(inverse(derivative(fh, 2)))) + sq(l2_norm(inverse(derivative(fh, 1, 2)))) +
                     2 * sq(l2_norm(inverse(mixed_derivative(fh, 1, 1)))) +
                     sq(l2_norm(inverse(derivative(fh, 2, 2))));
    const double h2 = sq(sobolev_norm(f, 2.0));
    CHECK(q <= h2 * (1 + 1e-12));
    CHECK(h2 <= 2 * q * (1 + 1e-12));
  }

  TEST_CASE("mixed norms") {
    auto g = desk();
    const Field sep = Field::sample(g, [](double x1, double x2) {
      return (1.5 + std::cos(two_pi * x1)) * std::exp(-x2 * x2);
    });
    // ||g||_inf = 2.5, ||h||_L2 = (pi/2)^(1/4)
    const double expect = 2.5 * std::pow(pi / 2.0, 0.25);
    CHECK(std::abs(mixed_norm(sep, {1, Lp::infinity, Lp::two}) - expect) <= 1e-10);

    const Field c = Field::sample(g, [](double, double) { return -3.0; });
    CHECK(std::abs(mixed_norm(c, {1, Lp::two, Lp::infinity}) - 3.0) <= 1e-14);
    CHECK_THROWS_AS(mixed_norm(c, {3, Lp::two, Lp::two}), std::invalid_argument);

    // Hoelder chain
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Field a = ensemble_field(g, 3 * s), b = ensemble_field(g, 3 * s + 1), h = ensemble_field(g, 3 * s + 2);
      Field abs_prod(g);
      for (std::size_t i = 0; i < abs_prod.values().size(); ++i)
        abs_prod.values()[i] = std::abs(a.values()[i] * b.values()[i] * h.values()[i]);
      const double l1 = integrate(abs_prod);
      const double rhs = mixed_norm(a, {1, Lp::infinity, Lp::two}) * mixed_norm(b, {1, Lp::two, Lp::infinity}) * l2_norm(h);
      CHECK(l1 <= rhs * (1 + 1e-10));
    }
  }

  TEST_CASE("triple product") {
    auto g = desk();
    const Field s = Field::sample(g, [](double x1, double) { return std::sin(two_pi * x1); });
    const Field c = Field::sample(g, [](double x1, double) { return std::cos(two_pi * x1); });
    const Field one = Field::sample(g, [](double, double) { return 1.0; });
    CHECK(std::abs(triple_product(s, c, one)) <= 1e-13);
    CHECK(triple_product(s, c, Field(g)) == 0.0);
    const Field gauss = Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
    // integral of exp(-3 x2^2) over R is sqrt(pi/3)
    CHECK(std::abs(triple_product(gauss, gauss, gauss) - std::sqrt(pi / 3.0)) <= 1e-12);
    CHECK_THROWS_AS(triple_product(gauss, Field(make_grid({128, 256, 9.0})), gauss), std::invalid_argument);
  }

  TEST_CASE("Poincare L2 sharp constant on a single mode") {
    auto g = desk();
    const Field f = Field::sample(g, [](double x1, double x2) { return std::sin(two_pi * x1) * std::exp(-x2 * x2); });
    const Field fields[] = {f};
    const RatioReport r = inequality_ratio(Inequality::poincare_l2, fields);
    REQUIRE(r.ratio);
    CHECK(std::abs(*r.ratio - 1.0 / two_pi) <= 1e-9);
  }

  TEST_CASE("degenerate right-hand side gives an undefined ratio") {
    auto g = desk();
    const Field strat = Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
    const Field fields[] = {strat};
    const RatioReport r = inequality_ratio(Inequality::poincare_l2, fields);
    CHECK_FALSE(r.ratio);
    CHECK(r.lhs <= 1e-15);
  }

  TEST_CASE("GG1 on centered Gaussians stays below sqrt 2") {
    // ||f||_inf = 1 and ||f|| ||f'|| = sqrt(pi/2) for every width, so the ratio
    // ||f||_inf / (||f|| ||f'||)^(1/2) is (2/pi)^(1/4).
    auto g = make_grid({8, 4096, 40.0});
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
      const Field f = Field::sample(g, [&](double, double x2) { return std::exp(-x2 * x2 / (s * s)); });
      const Field fields[] = {f};
      const RatioReport r = inequality_ratio(Inequality::gg1, fields);
      REQUIRE(r.ratio);
      CHECK(*r.ratio <= std::sqrt(2.0) + 1e-6);
      CHECK(*r.ratio == doctest::Approx(std::pow(2.0 / pi, 0.25)).epsilon(1e-9));
    }
  }

  TEST_CASE("1D periodic checks") {
    std::vector<double> line(64);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] = std::sin(two_pi * double(i) / 64.0);
    const RatioReport w2 = periodic_line_ratio(line, true);
    // sin: max 1, ||f|| = 1/sqrt2, ||f'|| = 2 pi / sqrt2
    REQUIRE(w2.ratio);
    CHECK(*w2.ratio == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-12));
    const RatioReport gg2 = periodic_line_ratio(line, false);
    REQUIRE(gg2.ratio);
    CHECK(*gg2.ratio <= std::sqrt(2.0));
    CHECK_THROWS_AS(periodic_line_ratio(std::vector<double>(7, 1.0), true), std::invalid_argument);
  }

  TEST_CASE("every variant evaluates on random fields") {
    auto g = desk();
    for (Inequality v : all_inequalities) {
      std::vector<Field> fields;
      for (int i = 0; i < arity(v); ++i) fields.push_back(ensemble_field(g, 40 + i));
      const RatioReport r = inequality_ratio(v, fields);
      CHECK(r.variant == v);
      REQUIRE(r.ratio);
      CHECK(std::isfinite(*r.ratio));
      CHECK(*r.ratio > 0.0);
      CHECK(parse_inequality(to_string(v)) == v);
    }
    CHECK_FALSE(parse_inequality("NOPE"));
    const Field one[] = {ensemble_field(g, 1)};
    CHECK_THROWS_AS(inequality_ratio(Inequality::ani, one), std::invalid_argument);
  }

  TEST_CASE("bridge from ANI to AN2 on zero-mean fields") {
    auto g = desk();
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Spectrum ft = oscillation(forward(ensemble_field(g, s)));
      const double a = l2_norm(ft), b = l2_norm(derivative(ft, 1));
      CHECK(a + b <= (1.0 + 1.0 / two_pi) * b * (1 + 1e-12));
    }
  }

  TEST_CASE("random fields") {
    auto g = desk();
    const Field a = random_field(g, {7, 3, 1.0});
    const Field b = random_field(g, {7, 3, 1.0});
    for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(a.values()[i] == b.values()[i]);

    const Spectrum s = forward(a);
    double beyond = 0.0;
    for (int r = 0; r < g->n2(); ++r)
      for (int c = 4; c < g->nc(); ++c) beyond = std::max(beyond, std::abs(s.at(c, r)));
    CHECK(beyond <= 1e-16);

    const Field edge = random_field(g, {11, 4, 10.0 / 6.0});
    double tail = 0.0;
    for (int j = 0; j < g->n2(); ++j)
      if (std::abs(g->x2_nodes()[j]) > 9.5)
        for (int i = 0; i < g->n1(); ++i) tail = std::max(tail, std::abs(edge.at(i, j)));
    CHECK(tail <= 1e-12 * max_abs(edge));

    CHECK_THROWS_AS(random_field(g, {0, 3, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(random_field(g, {0, 3, 0.0}), std::invalid_argument);
  }

  TEST_CASE("small ensemble summary") {
    auto g = desk();
    const EnsembleSummary e = run_ensemble(Inequality::poincare_l2, g, 0, 12);
    CHECK(e.count == 12);
    CHECK(e.defined == 12);
    CHECK(std::abs(e.max_ratio - 1.0 / two_pi) <= 1e-9);
    CHECK(e.median_ratio <= e.max_ratio);
    const EnsembleSummary again = run_ensemble(Inequality::poincare_l2, g, 0, 12);
    CHECK(again.max_ratio == e.max_ratio);
    CHECK(again.argmax_seed == e.argmax_seed);
  }
}
