#include "absq/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "absq/kernels.hpp"

namespace absq {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void validate(const GridSpec& s) {
  if (s.n1 < 8 || s.n1 % 2 != 0)
    throw std::invalid_argument("grid: n1 must be even and >= 8, got " + std::to_string(s.n1));
  if (s.n2 < 8 || s.n2 % 2 != 0)
    throw std::invalid_argument("grid: n2 must be even and >= 8, got " + std::to_string(s.n2));
  if (!(s.half_width > 0.0) || !std::isfinite(s.half_width))
    throw std::invalid_argument("grid: half_width must be positive");
  if (!(s.dealias_fraction > 0.0 && s.dealias_fraction <= 1.0))
    throw std::invalid_argument("grid: dealias_fraction must lie in (0, 1]");
}

int wrap(int m, int n) {
  int r = m % n;
  return r < 0 ? r + n : r;
}

}  // namespace

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  validate(spec_);
  const int n1 = spec_.n1, n2 = spec_.n2;
  const double L = spec_.half_width;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  x1_.resize(n1);
  for (int i = 0; i < n1; ++i) x1_[i] = static_cast<double>(i) / n1;
  x2_.resize(n2);
  for (int j = 0; j < n2; ++j) x2_[j] = -L + j * dx2();

  k1_table_.resize(n1);
  for (int m = -n1 / 2; m < n1 / 2; ++m) k1_table_[m + n1 / 2] = two_pi * m;
  k2_table_.resize(n2);
  for (int m = -n2 / 2; m < n2 / 2; ++m) k2_table_[m + n2 / 2] = std::numbers::pi * m / L;

  const std::size_t ns = spectral_size();
  k1_.resize(ns);
  k2_.resize(ns);
  ksq_.resize(ns);
  mult_.resize(ns);
  mask_.resize(ns);
  const double lim1 = spec_.dealias_fraction * n1 / 2.0;
  const double lim2 = spec_.dealias_fraction * n2 / 2.0;
  for (int r = 0; r < n2; ++r) {
    for (int c = 0; c < nc(); ++c) {
      const std::size_t idx = index(c, r);
      const int m1 = m1_of(c), m2 = m2_of(r);
      k1_[idx] = two_pi * m1;
      k2_[idx] = std::numbers::pi * m2 / L;
      ksq_[idx] = k1_[idx] * k1_[idx] + k2_[idx] * k2_[idx];
      mult_[idx] = (c == 0 || c == n1 / 2) ? 1.0 : 2.0;
      mask_[idx] = (std::abs(m1) <= lim1 && std::abs(m2) <= lim2) ? 1 : 0;
    }
  }

  std::lock_guard lock(planner_mutex());
  double* rbuf = fftw_alloc_real(size());
  fftw_complex* cbuf = fftw_alloc_complex(ns);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  r2c_plan_ = fftw_plan_dft_r2c_2d(n2, n1, rbuf, cbuf, flags);
  c2r_plan_ = fftw_plan_dft_c2r_2d(n2, n1, cbuf, rbuf, flags);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!r2c_plan_ || !c2r_plan_) throw std::runtime_error("grid: FFTW planning failed");
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  if (r2c_plan_) fftw_destroy_plan(static_cast<fftw_plan>(r2c_plan_));
  if (c2r_plan_) fftw_destroy_plan(static_cast<fftw_plan>(c2r_plan_));
}

void Grid::execute_r2c(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Grid::execute_c2r(cplx* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_plan_), reinterpret_cast<fftw_complex*>(in),
                       out);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (&a == &b) return;
  const auto& s = a.spec();
  const auto& t = b.spec();
  if (s.n1 != t.n1 || s.n2 != t.n2 || s.half_width != t.half_width ||
      s.dealias_fraction != t.dealias_fraction)
    throw std::invalid_argument("grid mismatch between operands");
}

// ---------------------------------------------------------------- Field

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw std::invalid_argument("field: value count must equal n1*n2");
}

Field Field::sample(GridPtr grid, const std::function<double(double, double)>& f) {
  Field out(grid);
  const auto& x1 = grid->x1_nodes();
  const auto& x2 = grid->x2_nodes();
  for (int j = 0; j < grid->n2(); ++j)
    for (int i = 0; i < grid->n1(); ++i) out.at(i, j) = f(x1[i], x2[j]);
  return out;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

// ---------------------------------------------------------------- Spectrum

Spectrum::Spectrum(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->spectral_size()) {}

Spectrum::Spectrum(GridPtr grid, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_->spectral_size())
    throw std::invalid_argument("spectrum: coefficient count must equal n2*(n1/2+1)");
}

cplx Spectrum::coeff(int m1, int m2) const {
  const int n1 = grid_->n1(), n2 = grid_->n2();
  if (m1 < -n1 / 2 || m1 >= n1 / 2 || m2 < -n2 / 2 || m2 >= n2 / 2)
    throw std::out_of_range("spectrum: mode index out of range");
  if (m1 == -n1 / 2) return at(n1 / 2, wrap(m2, n2));
  if (m1 >= 0) return at(m1, wrap(m2, n2));
  return std::conj(at(-m1, wrap(-m2, n2)));
}

void Spectrum::set_mode(int m1, int m2, cplx value) {
  const int n1 = grid_->n1(), n2 = grid_->n2();
  if (m1 < -n1 / 2 || m1 >= n1 / 2 || m2 < -n2 / 2 || m2 >= n2 / 2)
    throw std::out_of_range("spectrum: mode index out of range");
  if (m1 == 0 || m1 == -n1 / 2) {
    const int c = m1 == 0 ? 0 : n1 / 2;
    const int r = wrap(m2, n2), rp = wrap(-m2, n2);
    if (r == rp) {
      at(c, r) = value.real();
    } else {
      at(c, r) = value;
      at(c, rp) = std::conj(value);
    }
    return;
  }
  if (m1 > 0)
    at(m1, wrap(m2, n2)) = value;
  else
    at(-m1, wrap(-m2, n2)) = std::conj(value);
}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator*=(double a) {
  for (auto& v : coeffs_) v *= a;
  return *this;
}

Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
Spectrum operator*(double a, Spectrum s) { return s *= a; }

// ---------------------------------------------------------------- transforms

Spectrum forward(const Field& f) {
  const Grid& g = f.grid();
  for (double v : f.values())
    if (!std::isfinite(v)) throw std::invalid_argument("forward transform: non-finite sample");
  Spectrum out(f.grid_ptr());
  g.execute_r2c(f.values().data(), out.coeffs().data());
  const double norm = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs()) c *= norm;
  return out;
}

Field inverse(const Spectrum& s) {
  const Grid& g = s.grid();
  for (const auto& c : s.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("inverse transform: non-finite coefficient");
  thread_local std::vector<cplx> scratch;
  scratch.assign(s.coeffs().begin(), s.coeffs().end());
  Field out(s.grid_ptr());
  g.execute_c2r(scratch.data(), out.values().data());
  return out;
}

// ---------------------------------------------------------------- operators

namespace {

// i^order applied as an exact rotation.
cplx rotate_i(cplx z, int order) {
  switch (((order % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return -z;
    default: return {z.imag(), -z.real()};
  }
}

}  // namespace

Spectrum derivative(const Spectrum& s, int axis, int order) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("derivative: axis must be 1 or 2");
  if (order < 1) throw std::invalid_argument("derivative: order must be positive");
  return axis == 1 ? mixed_derivative(s, order, 0) : mixed_derivative(s, 0, order);
}

Spectrum mixed_derivative(const Spectrum& s, int order1, int order2) {
  if (order1 < 0 || order2 < 0) throw std::invalid_argument("derivative: negative order");
  const Grid& g = s.grid();
  Spectrum out(s.grid_ptr());
  const auto k1 = g.k1();
  const auto k2 = g.k2();
  const int total = order1 + order2;
  for (int r = 0; r < g.n2(); ++r) {
    for (int c = 0; c < g.nc(); ++c) {
      const std::size_t idx = g.index(c, r);
      if ((order1 % 2 == 1 && g.nyquist1(c)) || (order2 % 2 == 1 && g.nyquist2(r))) {
        out.coeffs()[idx] = 0.0;
        continue;
      }
      const double mag = std::pow(k1[idx], order1) * std::pow(k2[idx], order2);
      out.coeffs()[idx] = rotate_i(s.coeffs()[idx] * mag, total);
    }
  }
  return out;
}

Spectrum laplacian(const Spectrum& s) {
  Spectrum out = s;
  const auto ksq = s.grid().ksq();
  auto co = out.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i) co[i] *= -ksq[i];
  return out;
}

void dealias_in_place(Spectrum& s) {
  const auto mask = s.grid().dealias_mask();
  auto co = s.coeffs();
  for (std::size_t i = 0; i < co.size(); ++i)
    if (!mask[i]) co[i] = 0.0;
}

Spectrum dealias(Spectrum s) {
  dealias_in_place(s);
  return s;
}

Spectrum solve_streamfunction(const Spectrum& omega_hat) {
  Spectrum psi(omega_hat.grid_ptr());
  const auto ksq = omega_hat.grid().ksq();
  const auto w = omega_hat.coeffs();
  auto p = psi.coeffs();
  for (std::size_t i = 1; i < p.size(); ++i) p[i] = -w[i] / ksq[i];
  p[0] = 0.0;
  return psi;
}

// ---------------------------------------------------------------- integrals

double inner_product(const Spectrum& a, const Spectrum& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  const auto mult = g.multiplicity();
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  const double sum = kernels::row_ordered_sum(
      static_cast<std::size_t>(g.n2()), static_cast<std::size_t>(g.nc()), [&](std::size_t i) {
        return mult[i] * (ac[i].real() * bc[i].real() + ac[i].imag() * bc[i].imag());
      });
  return g.area() * sum;
}

double l2_norm(const Spectrum& s) { return std::sqrt(std::max(0.0, inner_product(s, s))); }

double integrate(const Field& f) {
  const Grid& g = f.grid();
  const auto v = f.values();
  return g.cell_area() * kernels::row_ordered_sum(static_cast<std::size_t>(g.n2()),
                                                  static_cast<std::size_t>(g.n1()),
                                                  [&](std::size_t i) { return v[i]; });
}

double inner_product(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  const auto av = a.values();
  const auto bv = b.values();
  return g.cell_area() * kernels::row_ordered_sum(static_cast<std::size_t>(g.n2()),
                                                  static_cast<std::size_t>(g.n1()),
                                                  [&](std::size_t i) { return av[i] * bv[i]; });
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

double max_abs(const Field& f) { return kernels::max_abs(f.values()); }

double hermitian_defect(const Spectrum& s) {
  const Grid& g = s.grid();
  double peak = 0.0;
  for (const auto& c : s.coeffs()) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0.0;
  double worst = 0.0;
  for (int c : {0, g.n1() / 2}) {
    for (int r = 0; r < g.n2(); ++r) {
      const int rp = r == 0 ? 0 : g.n2() - r;
      worst = std::max(worst, std::abs(s.at(c, r) - std::conj(s.at(c, rp))));
    }
  }
  return worst / peak;
}

}  // namespace absq
