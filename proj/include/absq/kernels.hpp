#pragma once

// Data-parallel inner loops of the solver and diagnostics.
//
// Every kernel has a plain serial reference in absq::kernels::serial and an
// OpenMP version in absq::kernels::omp. The unqualified absq::kernels entry
// points forward to the OpenMP versions. Reductions are row-ordered: each row
// is summed left to right, then rows are summed in index order, so results are
// bit-identical between the two variants and across thread counts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace absq::kernels {

using cplx = std::complex<double>;

namespace serial {

/// out = u1*g1 + u2*g2
inline void advection(std::span<const double> u1, std::span<const double> u2,
                      std::span<const double> g1, std::span<const double> g2,
                      std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u1[i] * g1[i] + u2[i] * g2[i];
}

inline void product(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

inline void scale_by(std::span<cplx> s, std::span<const double> factor) {
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= factor[i];
}

/// out = a*x + b*y
inline void axpby(std::span<cplx> out, double a, std::span<const cplx> x, double b,
                  std::span<const cplx> y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
}

template <class Term>
double row_ordered_sum(std::size_t rows, std::size_t row_len, Term&& term) {
  std::vector<double> partial(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const std::size_t base = r * row_len;
    for (std::size_t i = 0; i < row_len; ++i) acc += term(base + i);
    partial[r] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

inline double triple_sum(std::span<const double> f, std::span<const double> g,
                         std::span<const double> h, std::size_t row_len) {
  return row_ordered_sum(f.size() / row_len, row_len,
                         [&](std::size_t i) { return f[i] * g[i] * h[i]; });
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace serial

namespace omp {

inline void advection(std::span<const double> u1, std::span<const double> u2,
                      std::span<const double> g1, std::span<const double> g2,
                      std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = u1[i] * g1[i] + u2[i] * g2[i];
}

inline void product(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

inline void scale_by(std::span<cplx> s, std::span<const double> factor) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) s[i] *= factor[i];
}

inline void axpby(std::span<cplx> out, double a, std::span<const cplx> x, double b,
                  std::span<const cplx> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

template <class Term>
double row_ordered_sum(std::size_t rows, std::size_t row_len, Term&& term) {
  std::vector<double> partial(rows, 0.0);
  const std::ptrdiff_t nrows = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < nrows; ++r) {
    double acc = 0.0;
    const std::size_t base = static_cast<std::size_t>(r) * row_len;
    for (std::size_t i = 0; i < row_len; ++i) acc += term(base + i);
    partial[r] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

inline double triple_sum(std::span<const double> f, std::span<const double> g,
                         std::span<const double> h, std::size_t row_len) {
  return row_ordered_sum(f.size() / row_len, row_len,
                         [&](std::size_t i) { return f[i] * g[i] * h[i]; });
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace omp

using omp::advection;
using omp::axpby;
using omp::max_abs;
using omp::product;
using omp::row_ordered_sum;
using omp::scale_by;
using omp::triple_sum;

/// Number of OpenMP threads the parallel kernels will use.
int thread_count();
void set_thread_count(int n);

/// Flush-to-zero and denormals-are-zero on the calling thread and the OpenMP
/// workers for the guard's lifetime. Strongly damped modes otherwise decay
/// into subnormals, which run far slower than normal arithmetic.
class FlushDenormals {
 public:
  FlushDenormals();
  ~FlushDenormals();
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

}  // namespace absq::kernels
