#include "absq/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace absq {

Spectrum horizontal_average(const Spectrum& s) {
  const Grid& g = s.grid();
  Spectrum out(s.grid_ptr());
  for (int r = 0; r < g.n2(); ++r) out.at(0, r) = s.at(0, r);
  return out;
}

Spectrum oscillation(const Spectrum& s) {
  Spectrum out = s;
  for (int r = 0; r < s.grid().n2(); ++r) out.at(0, r) = 0.0;
  return out;
}

Profile horizontal_average(const Field& f) {
  const Field bar = inverse(horizontal_average(forward(f)));
  Profile p{f.grid_ptr(), std::vector<double>(f.grid().n2())};
  for (int j = 0; j < f.grid().n2(); ++j) p.values[j] = bar.at(0, j);
  return p;
}

Profile horizontal_average_direct(const Field& f) {
  const Grid& g = f.grid();
  Profile p{f.grid_ptr(), std::vector<double>(g.n2())};
  for (int j = 0; j < g.n2(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < g.n1(); ++i) acc += f.at(i, j);
    p.values[j] = acc / g.n1();
  }
  return p;
}

Field oscillation(const Field& f) { return inverse(oscillation(forward(f))); }

Field broadcast(const Profile& p) {
  Field out(p.grid);
  for (int j = 0; j < p.grid->n2(); ++j)
    for (int i = 0; i < p.grid->n1(); ++i) out.at(i, j) = p.values[j];
  return out;
}

double l2_norm(const Profile& p) {
  double acc = 0.0;
  for (double v : p.values) acc += v * v;
  return std::sqrt(acc * p.grid->dx2());
}

DecompositionReport decomposition_report(const Field& u1, const Field& u2, const Field& theta) {
  require_same_grid(u1.grid(), u2.grid());
  require_same_grid(u1.grid(), theta.grid());
  DecompositionReport rep;

  const Spectrum u1h = forward(u1), u2h = forward(u2);
  const Spectrum u1b = horizontal_average(u1h), u2b = horizontal_average(u2h);
  const Spectrum u1t = oscillation(u1h), u2t = oscillation(u2h);
  rep.div_bar_max = max_abs(inverse(derivative(u1b, 1) + derivative(u2b, 2)));
  rep.div_tilde_max = max_abs(inverse(derivative(u1t, 1) + derivative(u2t, 2)));
  rep.bar_u2_max = max_abs(inverse(u2b));

  for (const Field* f : {&u1, &u2, &theta}) {
    const double total = inner_product(*f, *f);
    if (total == 0.0) continue;
    const Field bar = broadcast(horizontal_average(*f));
    const Field tilde = oscillation(*f);
    const double cross = inner_product(bar, tilde);
    const double pyth = total - inner_product(bar, bar) - inner_product(tilde, tilde);
    rep.bar_tilde_inner = std::max(rep.bar_tilde_inner, std::abs(cross) / total);
    rep.pythagoras_residual = std::max(rep.pythagoras_residual, std::abs(pyth) / total);
  }

  rep.flagged = rep.div_bar_max > decomposition_flag_threshold ||
                rep.div_tilde_max > decomposition_flag_threshold ||
                rep.bar_u2_max > decomposition_flag_threshold ||
                rep.bar_tilde_inner > decomposition_flag_threshold ||
                rep.pythagoras_residual > decomposition_flag_threshold;
  return rep;
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  os << "x2,value\n" << std::setprecision(17);
  const auto& x2 = p.grid->x2_nodes();
  for (std::size_t j = 0; j < p.values.size(); ++j) os << x2[j] << ',' << p.values[j] << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  write_profile_csv(os, p);
}

}  // namespace absq
