#pragma once

#include <stdexcept>
#include <string>

namespace absq {

/// Raised when a run produces NaN/Inf; the message carries a diagnostic dump.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when any tracked norm exceeds the blow-up threshold.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration problem. Line is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string msg = "config";
    if (line > 0) msg += " line " + std::to_string(line);
    if (!key.empty()) msg += " key '" + key + "'";
    return msg + ": " + what;
  }

  std::string key_;
  int line_;
};

}  // namespace absq
