#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tow/dpp_solver.hpp"
#include "tow/extremal.hpp"
#include "tow/game.hpp"

namespace tow {

/// Flat key = value configuration. Every known key is present after parsing
/// (defaults filled in); values are stored in canonical text form so a
/// config that is emitted and parsed again compares equal.
class RunConfig {
 public:
  static constexpr int kSchema = 1;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  bool is_explicit(const std::string& key) const { return explicit_.count(key) != 0; }

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  /// Vector-valued key padded/truncated to dim components.
  Vec vec(const std::string& key, int dim) const;

  /// Overrides one key with validation (used for command-line flags).
  void set(const std::string& key, const std::string& value);

  bool operator==(const RunConfig& other) const { return values_ == other.values_; }

 private:
  friend RunConfig parse_config(const std::string& text);
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

/// Parses `key = value` lines with `#` comments. Errors: ParseError (line
/// number), UnknownKey (key), RangeError (key and value).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text of every key, one `key = value` line each, sorted by key.
std::string emit_config(const RunConfig& config);

/// Names of every recognized key.
std::vector<std::string> config_keys();

/// Named functions: zero, one, x1, linear, quadratic, saddle, sign_x1,
/// radial_p_harmonic, cos_x1. linear uses (a, b); radial_p_harmonic uses the
/// exponent (p - N)/(p - 1) unless one is given.
ScalarFn named_expression(const std::string& id, int dim, double p, const Vec& a = {}, double b = 0.0,
                          double exponent = std::numeric_limits<double>::quiet_NaN());

DppProblem problem_from_config(const RunConfig& config);
GameConfig game_from_config(const RunConfig& config);
ExtremalParams extremal_from_config(const RunConfig& config);

/// Exit status for an error kind: 2 configuration/usage, 3 numerical
/// failure, 4 input/output.
int exit_code(ErrorKind kind);

}  // namespace tow
