#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "absq/grid.hpp"
#include "absq/snapshot.hpp"

using namespace absq;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

Field noise(GridPtr g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Field f(g);
  for (double& v : f.values()) v = n(rng);
  return f;
}

// O(N^2) DFT with the index-phase convention, normalized by 1/(n1 n2).
cplx naive_coeff(const Field& f, int m1, int m2) {
  const Grid& g = f.grid();
  cplx acc = 0.0;
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double phase = two_pi * (double(m1) * i / g.n1() + double(m2) * j / g.n2());
      acc += f.at(i, j) * std::polar(1.0, -phase);
    }
  return acc / double(g.size());
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("make_grid wavenumber tables") {
    auto g = make_grid({8, 8, pi});
    for (int m = -4; m < 4; ++m) {
      CHECK(g->k2_table()[m + 4] == doctest::Approx(double(m)).epsilon(1e-15));
      CHECK(g->k1_table()[m + 4] == two_pi * m);
    }
    CHECK(g->x2_nodes().front() == -pi);
    CHECK(g->nc() == 5);
  }

  TEST_CASE("make_grid rejects bad specs") {
    CHECK_THROWS_AS(make_grid({7, 8, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({8, 9, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({6, 8, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({8, 8, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({8, 8, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({8, 8, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_grid({8, 8, 1.0, 1.5}), std::invalid_argument);
  }

  TEST_CASE("forward transform matches a naive DFT") {
    auto g = make_grid({16, 12, 2.5});
    const Field f = noise(g, 3);
    const Spectrum s = forward(f);
    double err = 0.0;
    for (int m2 = -6; m2 < 6; ++m2)
      for (int m1 = -8; m1 < 8; ++m1) err = std::max(err, std::abs(s.coeff(m1, m2) - naive_coeff(f, m1, m2)));
    CHECK(err < 1e-14);
  }

  TEST_CASE("pure modes") {
    auto g = make_grid({16, 16, 3.0});
    const Spectrum c = forward(Field::sample(g, [](double x1, double) { return std::cos(two_pi * x1); }));
    CHECK(std::abs(c.coeff(1, 0) - 0.5) < 1e-15);
    CHECK(std::abs(c.coeff(-1, 0) - 0.5) < 1e-15);
    double rest = 0.0;
    for (int r = 0; r < g->n2(); ++r)
      for (int col = 0; col < g->nc(); ++col)
        if (!(col == 1 && r == 0)) rest = std::max(rest, std::abs(c.at(col, r)));
    CHECK(rest < 1e-15);

    const Spectrum one = forward(Field::sample(g, [](double, double) { return 1.0; }));
    CHECK(std::abs(one.at(0, 0) - 1.0) < 1e-15);
    double others = 0.0;
    for (std::size_t i = 1; i < one.coeffs().size(); ++i) others = std::max(others, std::abs(one.coeffs()[i]));
    CHECK(others == 0.0);
  }

  TEST_CASE("round trip and Parseval on random data") {
    auto g = make_grid({128, 256, 10.0});
    for (unsigned seed = 0; seed < 5; ++seed) {
      const Field f = noise(g, seed);
      const Spectrum s = forward(f);
      const Field back = inverse(s);
      CHECK(max_abs(back - f) / max_abs(f) <= 1e-12);
      const double quad = inner_product(f, f);
      CHECK(std::abs(inner_product(s, s) - quad) / quad <= 1e-12);
      CHECK(hermitian_defect(s) <= 1e-13);
    }
  }

  TEST_CASE("non-finite input is rejected") {
    auto g = make_grid({8, 8, 1.0});
    Field f(g);
    f.at(2, 3) = std::nan("");
    CHECK_THROWS_AS(forward(f), std::invalid_argument);
    Spectrum s(g);
    s.at(1, 1) = cplx(INFINITY, 0.0);
    CHECK_THROWS_AS(inverse(s), std::invalid_argument);
  }

  TEST_CASE("analytic derivatives") {
    auto g = make_grid({128, 256, 10.0});
    const Field s1 = Field::sample(g, [](double x1, double) { return std::sin(two_pi * x1); });
    const Field c1 = Field::sample(g, [](double x1, double) { return two_pi * std::cos(two_pi * x1); });
    CHECK(max_abs(inverse(derivative(forward(s1), 1)) - c1) <= 1e-12);

    const Field only_x1 = Field::sample(g, [](double x1, double) { return std::cos(2 * two_pi * x1) + 3.0; });
    CHECK(max_abs(inverse(derivative(forward(only_x1), 2))) == 0.0);

    const Field gm = Field::sample(g, [](double x1, double x2) { return std::exp(-x2 * x2) * std::sin(two_pi * x1); });
    const Field d11 = inverse(derivative(forward(gm), 1, 2));
    CHECK(max_abs(d11 + (two_pi * two_pi) * gm) <= 1e-10);

    // d2 of a Gaussian: -2 x2 exp(-x2^2)
    const Field gx = Field::sample(g, [](double, double x2) { return std::exp(-x2 * x2); });
    const Field dgx = Field::sample(g, [](double, double x2) { return -2.0 * x2 * std::exp(-x2 * x2); });
    CHECK(max_abs(inverse(derivative(forward(gx), 2)) - dgx) <= 1e-10);

    const Field c = Field::sample(g, [](double, double) { return 2.5; });
    CHECK(max_abs(inverse(derivative(forward(c), 1))) == 0.0);
    CHECK_THROWS_AS(derivative(forward(c), 3), std::invalid_argument);
  }

  TEST_CASE("derivatives commute to the last bit") {
    auto g = make_grid({32, 32, 4.0});
    const Spectrum s = forward(noise(g, 11));
    const Spectrum a = derivative(derivative(s, 1), 2);
    const Spectrum b = derivative(derivative(s, 2), 1);
    const Spectrum m = mixed_derivative(s, 1, 1);
    double scale = 0.0;
    for (const cplx& c : m.coeffs()) scale = std::max(scale, std::abs(c));
    // (c k1) k2 and (c k2) k1 round differently; one ulp of the largest coefficient
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
      CHECK(std::abs(a.coeffs()[i] - b.coeffs()[i]) <= 1e-15 * scale);
      CHECK(std::abs(a.coeffs()[i] - m.coeffs()[i]) <= 1e-15 * scale);
    }
  }

  TEST_CASE("dealias mask") {
    auto g = make_grid({12, 12, 1.0});
    Spectrum s(g);
    s.set_mode(5, 0, 1.0);
    s.set_mode(1, 1, 1.0);
    const Spectrum d = dealias(s);
    CHECK(d.coeff(5, 0) == cplx(0.0));
    CHECK(d.coeff(1, 1) == cplx(1.0));
    CHECK(inner_product(d, d) <= inner_product(s, s));

    auto big = make_grid({128, 256, 10.0});
    const Spectrum r = forward(noise(big, 5));
    CHECK(l2_norm(dealias(r)) <= l2_norm(r));
  }

  TEST_CASE("streamfunction solve") {
    auto g = make_grid({64, 64, 5.0});
    const Spectrum w = forward(Field::sample(g, [](double x1, double) { return std::sin(two_pi * x1); }));
    const Field psi = inverse(solve_streamfunction(w));
    const Field expect = Field::sample(g, [](double x1, double) { return -std::sin(two_pi * x1) / (4 * pi * pi); });
    CHECK(max_abs(psi - expect) <= 1e-15);

    const Spectrum c = forward(Field::sample(g, [](double, double) { return 4.0; }));
    CHECK(max_abs(inverse(solve_streamfunction(c))) == 0.0);
  }

  TEST_CASE("zero spectrum stays zero") {
    auto g = make_grid({16, 16, 2.0});
    const Spectrum z(g);
    CHECK(max_abs(inverse(z)) == 0.0);
    CHECK(l2_norm(derivative(z, 1)) == 0.0);
    CHECK(l2_norm(laplacian(z)) == 0.0);
    CHECK(l2_norm(solve_streamfunction(z)) == 0.0);
    CHECK(l2_norm(dealias(z)) == 0.0);
  }

  TEST_CASE("grid mismatch is rejected") {
    auto a = make_grid({16, 16, 2.0});
    auto b = make_grid({16, 16, 3.0});
    CHECK_THROWS_AS(inner_product(Spectrum(a), Spectrum(b)), std::invalid_argument);
    auto c = make_grid({16, 16, 2.0});
    CHECK_NOTHROW(inner_product(Spectrum(a), Spectrum(c)));
  }

  TEST_CASE("snapshot round trip and header checks") {
    auto g = make_grid({16, 8, 1.5});
    const Field f = noise(g, 9);
    std::stringstream ss;
    write_snapshot(ss, f, PayloadKind::theta);
    CHECK(ss.str().size() == snapshot_header_bytes + 16 * 8 * sizeof(double));
    const Snapshot back = read_snapshot(ss);
    CHECK(back.kind == PayloadKind::theta);
    CHECK(back.field.grid().n1() == 16);
    CHECK(back.field.grid().half_width() == 1.5);
    for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(back.field.values()[i] == f.values()[i]);

    std::string bytes = ss.str();
    bytes[0] = 'X';
    std::stringstream bad(bytes);
    CHECK_THROWS(read_snapshot(bad));

    std::stringstream trunc(ss.str().substr(0, 40));
    CHECK_THROWS(read_snapshot(trunc));

    std::stringstream again(ss.str());
    CHECK_THROWS(read_snapshot(again, make_grid({16, 8, 2.0})));
  }

  TEST_CASE("full temperature adds x2") {
    auto g = make_grid({8, 8, 2.0});
    const Field t = full_temperature(Field(g));
    for (int j = 0; j < 8; ++j) CHECK(t.at(3, j) == g->x2_nodes()[j]);
  }
}
