#pragma once

// Periodic discretization of T x [-L, L] and its spectral machinery.
//
// Physical samples are row-major with x2 outer: value(i, j) sits at
// j * n1 + i for x1 = i / n1 and x2 = -L + j * 2L / n2. Spectra use the
// real-to-complex half plane: column c in [0, n1/2] is m1 = c, row r in
// [0, n2) is m2 = r for r < n2/2 and r - n2 otherwise. Coefficients with
// m1 < 0 are the complex conjugates of (-m1, -m2) and are not stored.
// The forward transform divides by n1 * n2, so coefficient (0, 0) is the mean.
// Phases follow the node index: mode (m1, m2) is exp(i (k1 x1 + k2 (x2 + L))).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace absq {

using cplx = std::complex<double>;

struct GridSpec {
  int n1 = 128;
  int n2 = 256;
  double half_width = 10.0;
  double dealias_fraction = 2.0 / 3.0;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Validates the spec and builds the grid with its FFT plans.
/// Throws std::invalid_argument for odd or too small counts, L <= 0, or a
/// dealias fraction outside (0, 1].
GridPtr make_grid(const GridSpec& spec);

class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int n1() const { return spec_.n1; }
  int n2() const { return spec_.n2; }
  /// Number of stored m1 columns, n1/2 + 1.
  int nc() const { return spec_.n1 / 2 + 1; }
  double half_width() const { return spec_.half_width; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.n1) * spec_.n2; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(nc()) * spec_.n2; }

  double dx1() const { return 1.0 / spec_.n1; }
  double dx2() const { return 2.0 * spec_.half_width / spec_.n2; }
  /// |Omega| = 1 * 2L.
  double area() const { return 2.0 * spec_.half_width; }
  double cell_area() const { return dx1() * dx2(); }

  const std::vector<double>& x1_nodes() const { return x1_; }
  const std::vector<double>& x2_nodes() const { return x2_; }

  /// Wavenumbers for m in [-n/2, n/2), in ascending m.
  const std::vector<double>& k1_table() const { return k1_table_; }
  const std::vector<double>& k2_table() const { return k2_table_; }

  int m1_of(int c) const { return c == spec_.n1 / 2 ? -spec_.n1 / 2 : c; }
  int m2_of(int r) const { return r < spec_.n2 / 2 ? r : r - spec_.n2; }
  std::size_t index(int c, int r) const { return static_cast<std::size_t>(r) * nc() + c; }

  bool nyquist1(int c) const { return c == spec_.n1 / 2; }
  bool nyquist2(int r) const { return r == spec_.n2 / 2; }

  /// Per stored mode: k1, k2, |k|^2, Parseval multiplicity (1 or 2), dealias mask.
  std::span<const double> k1() const { return k1_; }
  std::span<const double> k2() const { return k2_; }
  std::span<const double> ksq() const { return ksq_; }
  std::span<const double> multiplicity() const { return mult_; }
  std::span<const std::uint8_t> dealias_mask() const { return mask_; }

  /// Unnormalized FFTW execution; callers normally use forward()/inverse().
  void execute_r2c(const double* in, cplx* out) const;
  /// Destroys `in` (FFTW c2r semantics).
  void execute_c2r(cplx* in, double* out) const;

 private:
  GridSpec spec_;
  std::vector<double> x1_, x2_, k1_table_, k2_table_;
  std::vector<double> k1_, k2_, ksq_, mult_;
  std::vector<std::uint8_t> mask_;
  void* r2c_plan_ = nullptr;
  void* c2r_plan_ = nullptr;
};

/// Real samples on the grid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  /// Samples f(x1, x2) at every node.
  static Field sample(GridPtr grid, const std::function<double(double, double)>& f);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_->n1() + i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_->n1() + i]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

/// Half-plane complex coefficients.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(GridPtr grid);
  Spectrum(GridPtr grid, std::vector<cplx> coeffs);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx& at(int c, int r) { return coeffs_[grid_->index(c, r)]; }
  const cplx& at(int c, int r) const { return coeffs_[grid_->index(c, r)]; }

  /// Coefficient of mode (m1, m2) for any m1 in [-n1/2, n1/2), m2 in [-n2/2, n2/2).
  cplx coeff(int m1, int m2) const;
  /// Sets (m1, m2) and, where the partner (-m1, -m2) is also stored, its conjugate.
  void set_mode(int m1, int m2, cplx value);

  Spectrum& operator+=(const Spectrum& o);
  Spectrum& operator-=(const Spectrum& o);
  Spectrum& operator*=(double a);

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

Spectrum operator+(Spectrum a, const Spectrum& b);
Spectrum operator-(Spectrum a, const Spectrum& b);
Spectrum operator*(double a, Spectrum s);

enum class Direction { forward, inverse };

/// Throws std::invalid_argument on non-finite samples.
Spectrum forward(const Field& f);
/// Throws std::invalid_argument on non-finite coefficients.
Field inverse(const Spectrum& s);

/// Multiplies by (i k_axis)^order. Odd orders zero the Nyquist mode of that axis.
Spectrum derivative(const Spectrum& s, int axis, int order = 1);
/// Mixed derivative d1^order1 d2^order2 with a single combined multiplier.
Spectrum mixed_derivative(const Spectrum& s, int order1, int order2);
Spectrum laplacian(const Spectrum& s);

/// Zeroes every coefficient outside the dealias mask; leaves the rest untouched.
Spectrum dealias(Spectrum s);
void dealias_in_place(Spectrum& s);

/// psi with Laplacian psi = omega, psi(0,0) = 0.
Spectrum solve_streamfunction(const Spectrum& omega_hat);

/// Integral of a*b over Omega from coefficients (Parseval).
double inner_product(const Spectrum& a, const Spectrum& b);
double l2_norm(const Spectrum& s);
/// Rectangle-rule integral of f, and of f*g, over Omega.
double integrate(const Field& f);
double inner_product(const Field& a, const Field& b);
double l2_norm(const Field& f);
double max_abs(const Field& f);

/// Largest |c(0,-m2) - conj c(0,m2)| (and on the Nyquist column), relative to max |c|.
double hermitian_defect(const Spectrum& s);

/// Rejects operands living on different grid objects with std::invalid_argument.
void require_same_grid(const Grid& a, const Grid& b);

}  // namespace absq
