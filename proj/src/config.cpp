#include "absq/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "absq/errors.hpp"

namespace absq {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected a finite number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v, int line) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(key, line, "expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v, int line) {
  const long x = to_long(key, v, line);
  if (x < -1000000000L || x > 1000000000L) throw ConfigError(key, line, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t to_seed(const std::string& key, const std::string& v, int line) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(key, line, "expected a nonnegative integer seed, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(key, line, "expected true/false, got '" + v + "'");
}

struct Lines {
  int n1 = 0, n2 = 0, half_width = 0, dealias = 0, dt = 0, T = 0, nu = 0, kappa = 0,
      epsilon = 0, output_every = 0, snapshot_every = 0, sigma = 0, mode = 0, fit = 0,
      format = 0;
};

void validate(const ExperimentConfig& c, const Lines& at) {
  if (c.grid.n1 < 8 || c.grid.n1 % 2 != 0)
    throw ConfigError("n1", at.n1, "must be even and >= 8");
  if (c.grid.n2 < 8 || c.grid.n2 % 2 != 0)
    throw ConfigError("n2", at.n2, "must be even and >= 8");
  if (!(c.grid.half_width > 0.0)) throw ConfigError("half_width", at.half_width, "must be > 0");
  if (!(c.grid.dealias_fraction > 0.0 && c.grid.dealias_fraction <= 1.0))
    throw ConfigError("dealias_fraction", at.dealias, "must lie in (0, 1]");
  if (!(c.stepper.dt > 0.0)) throw ConfigError("dt", at.dt, "must be > 0");
  if (!(c.T >= 0.0)) throw ConfigError("T", at.T, "must be >= 0");
  if (!(c.phys.nu >= 0.0)) throw ConfigError("nu", at.nu, "must be >= 0");
  if (!(c.phys.kappa >= 0.0)) throw ConfigError("kappa", at.kappa, "must be >= 0");
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon", at.epsilon, "must be >= 0");
  if (c.stepper.output_every < 1)
    throw ConfigError("output_every", at.output_every, "must be >= 1");
  if (c.snapshot_every < 0)
    throw ConfigError("snapshot_every", at.snapshot_every, "must be >= 0");
  if (c.ic != IcPreset::single_mode || c.sigma != 0.0) {
    if (!(c.sigma > 0.0 && c.sigma <= c.grid.half_width / 6.0))
      throw ConfigError("sigma", at.sigma, "must satisfy 0 < sigma <= half_width/6");
  }
  if (c.ic == IcPreset::single_mode) {
    if (c.mode_m1 == 0 && c.mode_m2 == 0)
      throw ConfigError("mode_m1", at.mode, "single_mode needs a nonzero wavevector");
    if (std::abs(c.mode_m1) > c.grid.dealias_fraction * c.grid.n1 / 2.0 ||
        std::abs(c.mode_m2) > c.grid.dealias_fraction * c.grid.n2 / 2.0)
      throw ConfigError("mode_m1", at.mode, "mode lies outside the dealiased band");
  }
  if (!(c.fit_floor > 0.0)) throw ConfigError("fit_floor", at.fit, "must be > 0");
  if (c.report_format != "json" && c.report_format != "csv")
    throw ConfigError("report_format", at.format, "must be csv or json");
}

}  // namespace

std::string to_string(IcPreset p) {
  switch (p) {
    case IcPreset::gaussian_pair: return "gaussian_pair";
    case IcPreset::single_mode: return "single_mode";
    case IcPreset::random: return "random";
  }
  return "?";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  Lines at;
  std::string raw;
  int line = 0;
  bool seed_given = false;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string val = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "empty key");
    if (val.empty()) throw ConfigError(key, line, "empty value");

    if (key == "name") {
      c.name = val;
    } else if (key == "n1") {
      c.grid.n1 = to_int(key, val, line), at.n1 = line;
    } else if (key == "n2") {
      c.grid.n2 = to_int(key, val, line), at.n2 = line;
    } else if (key == "half_width") {
      c.grid.half_width = to_double(key, val, line), at.half_width = line;
    } else if (key == "dealias_fraction") {
      c.grid.dealias_fraction = to_double(key, val, line), at.dealias = line;
    } else if (key == "dt") {
      c.stepper.dt = to_double(key, val, line), at.dt = line;
    } else if (key == "T") {
      c.T = to_double(key, val, line), at.T = line;
    } else if (key == "nu") {
      c.phys.nu = to_double(key, val, line), at.nu = line;
    } else if (key == "kappa") {
      c.phys.kappa = to_double(key, val, line), at.kappa = line;
    } else if (key == "epsilon") {
      c.epsilon = to_double(key, val, line), at.epsilon = line;
    } else if (key == "output_every") {
      c.stepper.output_every = to_int(key, val, line), at.output_every = line;
    } else if (key == "snapshot_every") {
      c.snapshot_every = to_int(key, val, line), at.snapshot_every = line;
    } else if (key == "buoyancy_coupling") {
      c.phys.buoyancy_coupling = to_bool(key, val, line);
    } else if (key == "ic_preset") {
      if (val == "gaussian_pair") {
        c.ic = IcPreset::gaussian_pair;
      } else if (val == "single_mode") {
        c.ic = IcPreset::single_mode;
      } else if (val == "random") {
        c.ic = IcPreset::random;
      } else if (val.rfind("random(", 0) == 0 && val.back() == ')') {
        c.ic = IcPreset::random;
        c.seed = to_seed(key, trim(val.substr(7, val.size() - 8)), line);
        seed_given = true;
      } else {
        throw ConfigError(key, line, "unknown preset '" + val + "'");
      }
    } else if (key == "seed") {
      if (seed_given) throw ConfigError(key, line, "seed already given in ic_preset");
      c.seed = to_seed(key, val, line);
    } else if (key == "sigma") {
      c.sigma = to_double(key, val, line), at.sigma = line;
    } else if (key == "mode_m1") {
      c.mode_m1 = to_int(key, val, line), at.mode = line;
    } else if (key == "mode_m2") {
      c.mode_m2 = to_int(key, val, line), at.mode = line;
    } else if (key == "fit_t0") {
      c.fit_t0 = to_double(key, val, line), at.fit = line;
    } else if (key == "fit_floor") {
      c.fit_floor = to_double(key, val, line), at.fit = line;
    } else if (key == "report_format") {
      c.report_format = val, at.format = line;
    } else if (key == "output_dir") {
      c.output_dir = val;
    } else {
      throw ConfigError(key, line, "unknown key");
    }
  }
  validate(c, at);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << std::setprecision(17);
  out << "name = " << c.name << '\n'
      << "n1 = " << c.grid.n1 << '\n'
      << "n2 = " << c.grid.n2 << '\n'
      << "half_width = " << c.grid.half_width << '\n'
      << "dealias_fraction = " << c.grid.dealias_fraction << '\n'
      << "dt = " << c.stepper.dt << '\n'
      << "T = " << c.T << '\n'
      << "nu = " << c.phys.nu << '\n'
      << "kappa = " << c.phys.kappa << '\n'
      << "epsilon = " << c.epsilon << '\n'
      << "output_every = " << c.stepper.output_every << '\n'
      << "snapshot_every = " << c.snapshot_every << '\n'
      << "buoyancy_coupling = " << (c.phys.buoyancy_coupling ? "true" : "false") << '\n'
      << "ic_preset = " << to_string(c.ic) << '\n'
      << "seed = " << c.seed << '\n'
      << "sigma = " << c.sigma << '\n'
      << "mode_m1 = " << c.mode_m1 << '\n'
      << "mode_m2 = " << c.mode_m2 << '\n'
      << "fit_t0 = " << c.fit_t0 << '\n'
      << "fit_floor = " << c.fit_floor << '\n'
      << "report_format = " << c.report_format << '\n';
  if (!c.output_dir.empty()) out << "output_dir = " << c.output_dir.string() << '\n';
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("ABSQ_PRESET_DIR"); env && *env) return env;
  return ABSQ_PRESET_DIR;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  const fs::path dir = preset_dir();
  for (const fs::path& p : {dir / name_or_path, dir / (name_or_path + ".cfg")})
    if (fs::is_regular_file(p)) return p;
  throw ConfigError("", 0, "no config file or preset named '" + name_or_path + "'");
}

}  // namespace absq
