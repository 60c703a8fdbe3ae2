// Serial reference vs OpenMP kernels, plus a full stepper step, on the
// default 128 x 256 grid. Prints one line per kernel with the mean time per
// call and whether the two variants agree bit for bit.
//
//   bench_kernels [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "absq/dynamics.hpp"
#include "absq/kernels.hpp"

namespace k = absq::kernels;

namespace {

template <class F>
double time_per_call(int repeats, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::micro>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_us, double omp_us, bool identical) {
  std::printf("%-14s serial %9.2f us   omp %9.2f us   speedup %5.2f   identical %s\n", name,
              serial_us, omp_us, serial_us / omp_us, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 200;
  const std::size_t n1 = 128, n2 = 256, n = n1 * n2;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> a(n), b(n), c(n), d(n), out_s(n), out_o(n);
  for (auto* v : {&a, &b, &c, &d})
    for (double& x : *v) x = normal(rng);

  std::printf("threads: %d, grid %zux%zu, %d repeats\n", k::thread_count(), n1, n2, repeats);

  double ts = time_per_call(repeats, [&] { k::serial::advection(a, b, c, d, out_s); });
  double to = time_per_call(repeats, [&] { k::omp::advection(a, b, c, d, out_o); });
  report("advection", ts, to, out_s == out_o);

  ts = time_per_call(repeats, [&] { k::serial::product(a, b, out_s); });
  to = time_per_call(repeats, [&] { k::omp::product(a, b, out_o); });
  report("product", ts, to, out_s == out_o);

  double rs = 0.0, ro = 0.0;
  ts = time_per_call(repeats, [&] { rs = k::serial::triple_sum(a, b, c, n1); });
  to = time_per_call(repeats, [&] { ro = k::omp::triple_sum(a, b, c, n1); });
  report("triple_sum", ts, to, rs == ro);

  ts = time_per_call(repeats, [&] { rs = k::serial::max_abs(a); });
  to = time_per_call(repeats, [&] { ro = k::omp::max_abs(a); });
  report("max_abs", ts, to, rs == ro);

  const std::size_t ns = (n1 / 2 + 1) * n2;
  std::vector<k::cplx> x(ns), y(ns), zs(ns), zo(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    x[i] = {normal(rng), normal(rng)};
    y[i] = {normal(rng), normal(rng)};
  }
  ts = time_per_call(repeats, [&] { k::serial::axpby(zs, 0.3, x, -1.7, y); });
  to = time_per_call(repeats, [&] { k::omp::axpby(zo, 0.3, x, -1.7, y); });
  report("axpby", ts, to, zs == zo);

  std::vector<double> factor(ns);
  for (double& f : factor) f = std::exp(-std::abs(normal(rng)));
  auto ss = x, so = x;
  ts = time_per_call(repeats, [&] { k::serial::scale_by(ss, factor); });
  to = time_per_call(repeats, [&] { k::omp::scale_by(so, factor); });
  report("scale_by", ts, to, ss == so);

  // Whole step for context: transforms dominate.
  auto grid = absq::make_grid({128, 256, 10.0});
  const auto psi = absq::Field::sample(grid, [](double x1, double x2) {
    return 1e-3 * std::exp(-x2 * x2) * (0.5 + std::sin(6.283185307179586 * x1));
  });
  const auto theta = absq::Field::sample(grid, [](double x1, double x2) {
    return 1e-3 * std::exp(-(x2 - 0.5) * (x2 - 0.5)) * std::cos(6.283185307179586 * x1);
  });
  absq::State s = absq::state_from_streamfunction(psi, theta);
  absq::Stepper stepper(grid, {1.0, 1.0, true}, {1e-3, 100});
  const int steps = std::max(1, repeats / 10);
  const double step_us = time_per_call(steps, [&] { stepper.step(s); });
  std::printf("%-14s %9.2f us per step (%d steps)\n", "stepper", step_us, steps);
  return 0;
}
