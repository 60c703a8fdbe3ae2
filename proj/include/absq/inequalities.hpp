#pragma once

// Sobolev and mixed anisotropic norms, and ratio checkers for the 1D and
// anisotropic inequalities used in the stability analysis.
//
// Every checker returns LHS and the RHS with its constant stripped, so the
// ratio is an empirical lower bound for that constant.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absq/decomposition.hpp"
#include "absq/grid.hpp"

namespace absq {

enum class Lp { two, infinity };

struct SobolevNorm {
  double s = 0.0;
};

/// Inner norm along `inner_axis` on every line, then the outer norm across lines.
/// {1, infinity, two} is the L^2_{x2} L^inf_{x1} norm.
struct MixedNorm {
  int inner_axis = 1;
  Lp inner = Lp::two;
  Lp outer = Lp::two;
};

using NormSpec = std::variant<SobolevNorm, MixedNorm>;

/// (sum (1 + |k|^2)^s |fhat|^2 * |Omega|)^(1/2). Throws on s < 0.
double sobolev_norm(const Spectrum& f, double s);
double sobolev_norm(const Field& f, double s);
/// Throws std::invalid_argument for an axis other than 1 or 2.
double mixed_norm(const Field& f, const MixedNorm& spec);
double norm(const Field& f, const NormSpec& spec);

/// Rectangle-rule integral of f*g*h over Omega. Rejects mismatched grids.
double triple_product(const Field& f, const Field& g, const Field& h);

enum class Inequality {
  gg1,            // whole-line 1D sup bound, x2 lines
  gg2,            // periodic 1D sup bound with lower-order term, x1 lines
  w2,             // periodic 1D sup bound for mean-zero data, x1 lines
  ani,            // anisotropic triple-product bound
  two_gg,         // anisotropic sup bound
  an2,            // triple-product bound with an oscillation factor
  linf_tilde,     // sup bound for an oscillation
  poincare_l2,    // ||ftilde|| <= C ||d1 ftilde||
  poincare_linf,  // ||ftilde||_inf <= C ||d1 ftilde||_H1
};

inline constexpr Inequality all_inequalities[] = {
    Inequality::gg1,    Inequality::gg2,        Inequality::w2,
    Inequality::ani,    Inequality::two_gg,     Inequality::an2,
    Inequality::linf_tilde, Inequality::poincare_l2, Inequality::poincare_linf};

std::string_view to_string(Inequality v);
std::optional<Inequality> parse_inequality(std::string_view name);
/// Number of fields the checker consumes (1 or 3).
int arity(Inequality v);

struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Empty when rhs == 0.
  std::optional<double> ratio;
  Inequality variant = Inequality::gg1;
  std::vector<std::uint64_t> seeds;
};

/// Evaluates one inequality. `fields` must hold arity(v) fields on one grid.
/// Variants that concern an oscillation apply oscillation() to the first field.
/// For the 1D variants the report is the worst line of the field.
RatioReport inequality_ratio(Inequality v, std::span<const Field> fields);

/// 1D checks on a single profile (values on the x2 nodes, treated as a line
/// standing in for R) and on a single x1 line of length 1.
RatioReport gg1_ratio(const Profile& p);
RatioReport periodic_line_ratio(std::span<const double> line, bool mean_zero);

struct RandomFieldSpec {
  std::uint64_t seed = 0;
  /// Largest |m1| present.
  int band_limit = 4;
  /// Envelope exp(-(x2/sigma)^2); must satisfy 0 < sigma <= L/6.
  double sigma = 1.0;
};

/// Seeded, reproducible field: modes |m1| <= band_limit exactly, each carrying
/// a Gaussian x2 envelope with a random low-wavenumber modulation.
Field random_field(GridPtr grid, const RandomFieldSpec& spec);

/// Field used by the ensemble for a given seed: band limit 1 + seed % 6 and an
/// envelope width between L/12 and L/6, both derived from the seed.
Field ensemble_field(GridPtr grid, std::uint64_t seed);

struct EnsembleSummary {
  Inequality variant = Inequality::gg1;
  std::size_t count = 0;
  /// Samples with a defined ratio.
  std::size_t defined = 0;
  double max_ratio = 0.0;
  std::uint64_t argmax_seed = 0;
  double median_ratio = 0.0;
};

/// Runs seeds first_seed .. first_seed + count - 1. Arity-3 variants use the
/// fields of seeds 3s, 3s+1, 3s+2 (via ensemble_field) for sample s.
EnsembleSummary run_ensemble(Inequality v, GridPtr grid, std::uint64_t first_seed,
                             std::size_t count);

}  // namespace absq
