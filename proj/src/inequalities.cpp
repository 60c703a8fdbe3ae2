#include "absq/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "absq/kernels.hpp"

namespace absq {

// ---------------------------------------------------------------- norms

double sobolev_norm(const Spectrum& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: s must be nonnegative");
  const Grid& g = f.grid();
  const auto ksq = g.ksq();
  const auto mult = g.multiplicity();
  const auto c = f.coeffs();
  const double sum = kernels::row_ordered_sum(
      static_cast<std::size_t>(g.n2()), static_cast<std::size_t>(g.nc()), [&](std::size_t i) {
        const double w = s == 0.0 ? 1.0 : std::pow(1.0 + ksq[i], s);
        return mult[i] * w * std::norm(c[i]);
      });
  return std::sqrt(g.area() * sum);
}

double sobolev_norm(const Field& f, double s) { return sobolev_norm(forward(f), s); }

namespace {

double combine(std::span<const double> values, Lp p, double spacing) {
  if (p == Lp::infinity) return kernels::serial::max_abs(values);
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc * spacing);
}

}  // namespace

double mixed_norm(const Field& f, const MixedNorm& spec) {
  if (spec.inner_axis != 1 && spec.inner_axis != 2)
    throw std::invalid_argument("mixed_norm: inner_axis must be 1 or 2");
  const Grid& g = f.grid();
  const int n1 = g.n1(), n2 = g.n2();
  std::vector<double> line, inner;
  if (spec.inner_axis == 1) {
    inner.resize(n2);
    for (int j = 0; j < n2; ++j) {
      const auto row = f.values().subspan(static_cast<std::size_t>(j) * n1, n1);
      inner[j] = combine(row, spec.inner, g.dx1());
    }
    return combine(inner, spec.outer, g.dx2());
  }
  inner.resize(n1);
  line.resize(n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) line[j] = f.at(i, j);
    inner[i] = combine(line, spec.inner, g.dx2());
  }
  return combine(inner, spec.outer, g.dx1());
}

double norm(const Field& f, const NormSpec& spec) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SobolevNorm>)
          return sobolev_norm(f, s.s);
        else
          return mixed_norm(f, s);
      },
      spec);
}

double triple_product(const Field& f, const Field& g, const Field& h) {
  require_same_grid(f.grid(), g.grid());
  require_same_grid(f.grid(), h.grid());
  const Grid& gr = f.grid();
  return gr.cell_area() *
         kernels::triple_sum(f.values(), g.values(), h.values(), static_cast<std::size_t>(gr.n1()));
}

// ---------------------------------------------------------------- naming

std::string_view to_string(Inequality v) {
  switch (v) {
    case Inequality::gg1: return "GG1";
    case Inequality::gg2: return "GG2";
    case Inequality::w2: return "W2";
    case Inequality::ani: return "ANI";
    case Inequality::two_gg: return "TWO_GG";
    case Inequality::an2: return "AN2";
    case Inequality::linf_tilde: return "LINF_TILDE";
    case Inequality::poincare_l2: return "POINCARE_L2";
    case Inequality::poincare_linf: return "POINCARE_LINF";
  }
  return "?";
}

std::optional<Inequality> parse_inequality(std::string_view name) {
  for (auto v : all_inequalities)
    if (to_string(v) == name) return v;
  return std::nullopt;
}

int arity(Inequality v) {
  return (v == Inequality::ani || v == Inequality::an2) ? 3 : 1;
}

// ---------------------------------------------------------------- ratios

namespace {

RatioReport make_report(Inequality v, double lhs, double rhs) {
  RatioReport r;
  r.variant = v;
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs > 0.0) r.ratio = lhs / rhs;
  return r;
}

// Keeps the line with the largest ratio; lines with rhs == 0 only win when
// nothing else is defined.
void keep_worst(RatioReport& worst, const RatioReport& cand, bool& any) {
  if (!any) {
    worst = cand;
    any = true;
    return;
  }
  if (cand.ratio && (!worst.ratio || *cand.ratio > *worst.ratio)) worst = cand;
}

double line_l2(std::span<const double> v, double h) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc * h);
}

RatioReport gg1_field(const Field& f) {
  const Grid& g = f.grid();
  const Field d2 = inverse(derivative(forward(f), 2));
  RatioReport worst = make_report(Inequality::gg1, 0.0, 0.0);
  bool any = false;
  std::vector<double> line(g.n2()), dline(g.n2());
  for (int i = 0; i < g.n1(); ++i) {
    for (int j = 0; j < g.n2(); ++j) {
      line[j] = f.at(i, j);
      dline[j] = d2.at(i, j);
    }
    const double lhs = kernels::serial::max_abs(line);
    const double rhs = std::sqrt(line_l2(line, g.dx2()) * line_l2(dline, g.dx2()));
    keep_worst(worst, make_report(Inequality::gg1, lhs, rhs), any);
  }
  return worst;
}

RatioReport x1_lines(const Field& f, bool mean_zero) {
  const Grid& g = f.grid();
  const Field base = mean_zero ? oscillation(f) : f;
  const Field d1 = inverse(derivative(forward(base), 1));
  const Inequality v = mean_zero ? Inequality::w2 : Inequality::gg2;
  RatioReport worst = make_report(v, 0.0, 0.0);
  bool any = false;
  const int n1 = g.n1();
  for (int j = 0; j < g.n2(); ++j) {
    const auto row = base.values().subspan(static_cast<std::size_t>(j) * n1, n1);
    const auto drow = d1.values().subspan(static_cast<std::size_t>(j) * n1, n1);
    const double a = line_l2(row, g.dx1());
    const double b = line_l2(drow, g.dx1());
    const double lhs = kernels::serial::max_abs(row);
    const double rhs = mean_zero ? std::sqrt(a * b) : std::sqrt(a * b) + a;
    keep_worst(worst, make_report(v, lhs, rhs), any);
  }
  return worst;
}

}  // namespace

RatioReport gg1_ratio(const Profile& p) {
  const Grid& g = *p.grid;
  const Field f = broadcast(p);
  const Field d2 = inverse(derivative(forward(f), 2));
  std::vector<double> dline(g.n2());
  for (int j = 0; j < g.n2(); ++j) dline[j] = d2.at(0, j);
  const double lhs = kernels::serial::max_abs(p.values);
  const double rhs = std::sqrt(line_l2(p.values, g.dx2()) * line_l2(dline, g.dx2()));
  return make_report(Inequality::gg1, lhs, rhs);
}

RatioReport periodic_line_ratio(std::span<const double> line, bool mean_zero) {
  const std::size_t n = line.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("periodic_line_ratio: even length >= 2");
  // Spectral derivative of a period-1 line by direct DFT; lines are short.
  std::vector<double> v(line.begin(), line.end());
  if (mean_zero) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    for (double& x : v) x -= mean;
  }
  std::vector<cplx> hat(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += v[i] * std::polar(1.0, -2.0 * std::numbers::pi * double(m * i % n) / double(n));
    hat[m] = acc / double(n);
  }
  std::vector<double> dv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const long mm = m < n / 2 ? long(m) : long(m) - long(n);
      if (m == n / 2) continue;
      acc += hat[m] * cplx(0.0, 2.0 * std::numbers::pi * double(mm)) *
             std::polar(1.0, 2.0 * std::numbers::pi * double(m * i % n) / double(n));
    }
    dv[i] = acc.real();
  }
  const double h = 1.0 / double(n);
  const double a = line_l2(v, h), b = line_l2(dv, h);
  const double lhs = kernels::serial::max_abs(v);
  const double rhs = mean_zero ? std::sqrt(a * b) : std::sqrt(a * b) + a;
  return make_report(mean_zero ? Inequality::w2 : Inequality::gg2, lhs, rhs);
}

RatioReport inequality_ratio(Inequality v, std::span<const Field> fields) {
  if (fields.size() != static_cast<std::size_t>(arity(v)))
    throw std::invalid_argument("inequality_ratio: wrong number of fields for " +
                                std::string(to_string(v)));
  for (const auto& f : fields) require_same_grid(fields[0].grid(), f.grid());

  switch (v) {
    case Inequality::gg1: return gg1_field(fields[0]);
    case Inequality::gg2: return x1_lines(fields[0], false);
    case Inequality::w2: return x1_lines(fields[0], true);
    default: break;
  }

  const bool tilde = v == Inequality::an2 || v == Inequality::linf_tilde ||
                     v == Inequality::poincare_l2 || v == Inequality::poincare_linf;
  const Spectrum fh = tilde ? oscillation(forward(fields[0])) : forward(fields[0]);
  const double f0 = l2_norm(fh);
  const Spectrum d1f = derivative(fh, 1);
  const double f1 = l2_norm(d1f);

  switch (v) {
    case Inequality::ani:
    case Inequality::an2: {
      const Field f = inverse(fh);
      const Spectrum gh = forward(fields[1]);
      const double g0 = l2_norm(gh), g2 = l2_norm(derivative(gh, 2));
      const double h0 = l2_norm(fields[2]);
      const double lhs = std::abs(triple_product(f, fields[1], fields[2]));
      const double fpart = v == Inequality::ani ? std::sqrt(f0 * (f0 + f1)) : std::sqrt(f0 * f1);
      return make_report(v, lhs, fpart * std::sqrt(g0 * g2) * h0);
    }
    case Inequality::two_gg:
    case Inequality::linf_tilde: {
      const double lhs = max_abs(inverse(fh));
      const double f2 = l2_norm(derivative(fh, 2));
      const double f12 = l2_norm(mixed_derivative(fh, 1, 1));
      const double rhs = v == Inequality::two_gg
                             ? std::pow(f0 * (f0 + f1) * f2 * (f2 + f12), 0.25)
                             : std::pow(f0 * f1 * f2 * f12, 0.25);
      return make_report(v, lhs, rhs);
    }
    case Inequality::poincare_l2: return make_report(v, f0, f1);
    case Inequality::poincare_linf:
      return make_report(v, max_abs(inverse(fh)), sobolev_norm(d1f, 1.0));
    default: break;
  }
  throw std::logic_error("inequality_ratio: unhandled variant");
}

// ---------------------------------------------------------------- random fields

Field random_field(GridPtr grid, const RandomFieldSpec& spec) {
  const Grid& g = *grid;
  const double L = g.half_width();
  if (!(spec.sigma > 0.0) || spec.sigma > L / 6.0 * (1.0 + 1e-12))
    throw std::invalid_argument("random_field: sigma must lie in (0, L/6] to keep the x2 tail "
                                "below round-off at |x2| = L");
  if (spec.band_limit < 0 || spec.band_limit >= g.n1() / 2)
    throw std::invalid_argument("random_field: band_limit must lie in [0, n1/2)");

  constexpr int modulations = 3;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  const int nb = spec.band_limit + 1;
  std::vector<std::array<cplx, modulations>> z(nb);
  for (auto& zc : z)
    for (auto& v : zc) {
      const double re = normal(rng);
      const double im = normal(rng);
      v = {re, im};
    }

  Field out(grid);
  const auto& x1 = g.x1_nodes();
  const auto& x2 = g.x2_nodes();
  for (int j = 0; j < g.n2(); ++j) {
    const double s = x2[j] / spec.sigma;
    const double env = std::exp(-s * s);
    for (int c = 0; c < nb; ++c) {
      cplx prof = 0.0;
      for (int q = 0; q < modulations; ++q) prof += z[c][q] * std::polar(1.0, q * s);
      prof *= env / (1.0 + c);
      for (int i = 0; i < g.n1(); ++i)
        out.at(i, j) += (prof * std::polar(1.0, 2.0 * std::numbers::pi * c * x1[i])).real();
    }
  }
  Spectrum hat = forward(out);
  for (int r = 0; r < g.n2(); ++r)
    for (int c = nb; c < g.nc(); ++c) hat.at(c, r) = 0.0;
  return inverse(hat);
}

Field ensemble_field(GridPtr grid, std::uint64_t seed) {
  const double L = grid->half_width();
  // Weyl-sequence fraction in [0, 1) so the width varies smoothly with the seed.
  const double frac = std::fmod(static_cast<double>(seed) * 0.6180339887498949, 1.0);
  RandomFieldSpec spec;
  spec.seed = seed;
  spec.band_limit = std::min(1 + static_cast<int>(seed % 6), grid->n1() / 2 - 1);
  spec.sigma = L / 12.0 * (1.0 + frac);
  return random_field(std::move(grid), spec);
}

EnsembleSummary run_ensemble(Inequality v, GridPtr grid, std::uint64_t first_seed,
                             std::size_t count) {
  std::vector<std::optional<double>> ratios(count);
  const int k = arity(v);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(s);
    std::vector<Field> fields;
    for (int f = 0; f < k; ++f)
      fields.push_back(ensemble_field(grid, k == 1 ? seed : 3 * seed + static_cast<std::uint64_t>(f)));
    ratios[s] = inequality_ratio(v, fields).ratio;
  }

  EnsembleSummary out;
  out.variant = v;
  out.count = count;
  std::vector<double> defined;
  for (std::size_t s = 0; s < count; ++s) {
    if (!ratios[s]) continue;
    defined.push_back(*ratios[s]);
    if (defined.size() == 1 || *ratios[s] > out.max_ratio) {
      out.max_ratio = *ratios[s];
      out.argmax_seed = first_seed + s;
    }
  }
  out.defined = defined.size();
  if (!defined.empty()) {
    std::sort(defined.begin(), defined.end());
    const std::size_t m = defined.size();
    out.median_ratio = m % 2 ? defined[m / 2] : 0.5 * (defined[m / 2 - 1] + defined[m / 2]);
  }
  return out;
}

}  // namespace absq
