#pragma once

// Seeded invariant batteries for the grid, decomposition, inequality and
// budget modules, reported as JSON.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace absq {

enum class Suite { grid, decomposition, inequalities, budget, all };

std::optional<Suite> parse_suite(std::string_view name);

struct CheckResult {
  std::string name;
  std::string module;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  /// Per-variant inequality ensembles, keyed by variant name.
  nlohmann::json ensembles = nlohmann::json::object();
  bool passed() const;
  nlohmann::json to_json() const;
};

/// seed_count defaults per suite when empty: 100, and 500 for inequalities.
SuiteReport check_suite(Suite which, std::optional<std::size_t> seed_count = std::nullopt);

}  // namespace absq
