// Plain-text scenario configuration (YAML).
//
//   name: collapsed_homogeneous
//   n: 2
//   grid: {active_axes: [x1], resolution: 8}
//   L: [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]        # rows of [re, im] pairs
//   omega0: [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
//   rho: {expression: "1", normalize: false}       # or {file: rho.txt}
//   gauge: u
//   t_max: 10
//   sample_dt: 0.05
//   integrator: {rtol: 1e-10, atol: 1e-12}
//   checks:
//     - {name: lower_bound, phi: "0"}
//     - {name: derivative_sequence, epsilon: 0.1}
//
// Optional keys: k, backend, integrator fields, checks (defaults to every
// check with epsilon 0.1 and phi = 0).
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kflow/flow.hpp"
#include "kflow/verify.hpp"

namespace kflow::config {

class ConfigError : public std::runtime_error {
public:
  /// line is 1-based; 0 when no position is known.
  ConfigError(std::string field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

private:
  std::string field_;
  int line_;
};

struct CheckEntry {
  std::string name;
  double epsilon = 0.1;
  std::string phi = "0";  ///< canonical expression text

  bool operator==(const CheckEntry&) const = default;
};

struct ScenarioConfig {
  std::string name;
  int n = 1;
  std::vector<std::string> active_axes;
  int resolution = 8;
  Matrix l;
  Matrix omega0;
  std::string rho_expression;  ///< canonical text; empty when rho_file is set
  std::string rho_file;        ///< whitespace separated values in grid order
  bool normalize = false;
  flow::Gauge gauge = flow::Gauge::u;
  std::optional<int> k;
  double t_max = 10.0;
  double sample_dt = 0.05;
  Backend backend = Backend::spectral;
  flow::IntegratorSettings integrator;
  std::vector<CheckEntry> checks;

  /// Directory against which rho_file is resolved. Not serialized.
  std::string base_dir = ".";

  bool operator==(const ScenarioConfig& o) const;
};

/// Parses and fully validates (including building the Scenario).
ScenarioConfig parse(std::string_view text, std::string base_dir = ".");
ScenarioConfig load(const std::string& path);
/// Canonical text; parse(print(c)) == c.
std::string print(const ScenarioConfig& c);
/// FNV-1a 64 of print(c).
std::uint64_t hash(const ScenarioConfig& c);
std::string hash_hex(const ScenarioConfig& c);

flow::Scenario to_scenario(const ScenarioConfig& c);
ScalarField phi_field(const CheckEntry& entry, const PeriodicGrid& grid);
/// Configured checks, or every check with defaults when none are listed.
std::vector<CheckEntry> effective_checks(const ScenarioConfig& c);

}  // namespace kflow::config
