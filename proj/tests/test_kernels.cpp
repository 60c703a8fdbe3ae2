#include <doctest.h>

#include <random>
#include <vector>

#include "absq/dynamics.hpp"
#include "absq/kernels.hpp"

namespace k = absq::kernels;

namespace {

std::vector<double> normals(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("OpenMP kernels match the serial reference bit for bit") {
    const std::size_t n1 = 64, n2 = 48, n = n1 * n2;
    const auto a = normals(n, 1), b = normals(n, 2), c = normals(n, 3), d = normals(n, 4);
    std::vector<double> s(n), o(n);

    k::serial::advection(a, b, c, d, s);
    k::omp::advection(a, b, c, d, o);
    CHECK(s == o);

    k::serial::product(a, b, s);
    k::omp::product(a, b, o);
    CHECK(s == o);

    CHECK(k::serial::triple_sum(a, b, c, n1) == k::omp::triple_sum(a, b, c, n1));
    CHECK(k::serial::max_abs(a) == k::omp::max_abs(a));

    std::vector<k::cplx> x(n), y(n), zs(n), zo(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {a[i], b[i]};
      y[i] = {c[i], d[i]};
    }
    k::serial::axpby(zs, 0.25, x, -3.0, y);
    k::omp::axpby(zo, 0.25, x, -3.0, y);
    CHECK(zs == zo);

    std::vector<double> f(n, 0.5);
    auto ss = x, so = x;
    k::serial::scale_by(ss, f);
    k::omp::scale_by(so, f);
    CHECK(ss == so);
  }

  TEST_CASE("row-ordered sums do not depend on the thread count") {
    const std::size_t n1 = 128, n2 = 256;
    const auto a = normals(n1 * n2, 5), b = normals(n1 * n2, 6), c = normals(n1 * n2, 7);
    const int before = k::thread_count();
    k::set_thread_count(1);
    const double one = k::triple_sum(a, b, c, n1);
    k::set_thread_count(4);
    const double four = k::triple_sum(a, b, c, n1);
    k::set_thread_count(before);
    CHECK(one == four);
  }

  TEST_CASE("a stepper step is bit-identical across thread counts") {
    auto grid = absq::make_grid({32, 64, 5.0});
    const auto psi = absq::Field::sample(grid, [](double x1, double x2) {
      return 1e-2 * std::exp(-x2 * x2) * (0.5 + std::sin(6.283185307179586 * x1));
    });
    const auto th = absq::Field::sample(grid, [](double x1, double x2) {
      return 1e-2 * std::exp(-x2 * x2) * std::cos(6.283185307179586 * x1);
    });
    const absq::State s0 = absq::state_from_streamfunction(psi, th);
    const int before = k::thread_count();
    auto run = [&](int threads) {
      k::set_thread_count(threads);
      absq::State s = s0;
      absq::Stepper st(grid, {0.5, 0.5, true}, {1e-3, 10});
      for (int i = 0; i < 5; ++i) st.step(s);
      return s;
    };
    const absq::State a = run(1), b = run(3);
    k::set_thread_count(before);
    for (std::size_t i = 0; i < a.omega_hat.coeffs().size(); ++i) {
      CHECK(a.omega_hat.coeffs()[i] == b.omega_hat.coeffs()[i]);
      CHECK(a.theta_hat.coeffs()[i] == b.theta_hat.coeffs()[i]);
    }
  }
}
