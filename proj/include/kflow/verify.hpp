// Diagnostics along a computed trajectory and the estimate checks.
//
// Every check follows the same fit-then-verify discipline: existential
// constants are fitted on the burn-in window [0, 1] only, then the estimate
// is asserted on (1, t_max]. All quantities are expressed in the u-gauge,
// whatever gauge the trajectory was integrated in.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kflow/flow.hpp"

namespace kflow::verify {

inline constexpr double kBurnInEnd = 1.0;
/// Relative margin added to fitted constants (floored at unit scale for
/// sign-indefinite offsets).
inline constexpr double kFitMargin = 0.1;
/// Absolute slack for inequalities whose two sides are computed independently.
inline constexpr double kNumericalTolerance = 1e-6;
inline constexpr double kMonotoneTolerance = 1e-7;
inline constexpr double kJensenTolerance = 1e-9;

struct DiagnosticsRow {
  double t = 0.0;
  double max_u = 0.0, min_u = 0.0, mean_u = 0.0;
  double max_udot = 0.0, min_udot = 0.0;
  double max_udot_plus_u = 0.0, min_udot_plus_u = 0.0, mean_udot_plus_u = 0.0;
  double max_uddot_plus_udot = 0.0, min_uddot_plus_udot = 0.0;
  double class_volume = 0.0;     ///< det of the class path at t
  double volume_integral = 0.0;  ///< integral of e^{du/dt + u} against rho
  double jensen_lhs = 0.0;       ///< integral of (du/dt + u) against normalized rho, gauge-corrected
  double osc_u = 0.0;
  double min_eig_metric = 0.0;
  double ric_min = 0.0, ric_max = 0.0;
  double lower_bound_min = 0.0;  ///< min over the grid of du/dt + u + n t - phi
  double max_abs_v = 0.0;        ///< max |u - f(t)|
  double conjecture_min = 0.0;   ///< min over the grid of u + k t - phi
};

/// Time derivative of u_dot: centered differences of cached right-hand side
/// samples (second-order one-sided at the ends). One field per sample.
std::vector<ScalarField> udot_rate_fd(const flow::Trajectory& trajectory);

/// The same quantity from the evolution identity
///   d(u_dot)/dt = Delta u_dot - e^{-t} <g, omega_0 - L> - u_dot
/// evaluated from a single u-gauge state.
ScalarField udot_rate_analytic(const flow::FlowState& u_state, const flow::Scenario& scenario,
                               Backend backend);

/// Pointwise diagnostics of one u-gauge state; `udot_rate` is d(u_dot)/dt.
DiagnosticsRow diagnostics(const flow::FlowState& u_state, const ScalarField& udot_rate,
                           const flow::Scenario& scenario, const ScalarField& phi,
                           Backend backend);

/// Throws std::invalid_argument unless L + i dd-bar phi is positive
/// semidefinite on the grid.
void require_psh(const flow::Scenario& scenario, const ScalarField& phi, Backend backend);

struct Analysis {
  const flow::Trajectory* trajectory = nullptr;
  std::vector<DiagnosticsRow> rows;
  ScalarField phi;
  bool phi_admissible = true;  ///< L + i dd-bar phi >= 0 on the grid
  int n = 0;
  int k = 0;
  double rho_mean = 1.0;
};

/// Diagnostics rows for every sample. phi defaults to 0; the backend defaults
/// to the scenario's. Checks that involve phi are inconclusive when phi is
/// not L-plurisubharmonic.
Analysis analyze(const flow::Trajectory& trajectory, std::optional<ScalarField> phi = std::nullopt,
                 std::optional<Backend> backend = std::nullopt);
/// The analysis keeps a pointer to the trajectory; temporaries would dangle.
Analysis analyze(const flow::Trajectory&& trajectory, std::optional<ScalarField> phi = std::nullopt,
                 std::optional<Backend> backend = std::nullopt) = delete;

enum class Verdict { pass, fail, inconclusive, consistent, violated };
std::string to_string(Verdict v);

struct CheckResult {
  std::string name;
  std::string anchor;
  std::map<std::string, double> fitted_constants;
  std::pair<double, double> burn_in{0.0, kBurnInEnd};
  Verdict verdict = Verdict::inconclusive;
  double worst_margin = 0.0;
  std::vector<std::pair<double, double>> evidence;
  std::string note;
  bool asserting = true;

  bool failed() const { return asserting && verdict == Verdict::fail; }
};

struct CheckReport {
  std::string scenario;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

CheckResult check_upper_bound_u(const Analysis& a);
CheckResult check_second_derivative_decay(const Analysis& a);
CheckResult check_monotone(const Analysis& a);
CheckResult check_volume_identity(const Analysis& a);
CheckResult check_jensen_upper(const Analysis& a);
CheckResult check_lower_bound(const Analysis& a);
CheckResult check_derivative_sequence(const Analysis& a, double epsilon = 0.1);
CheckResult check_semiample_asymptotic(const Analysis& a, std::optional<int> k = std::nullopt);
CheckResult check_conjecture(const Analysis& a);
CheckResult probe_limits(const Analysis& a);

/// Names accepted by run_check, in report order.
const std::vector<std::string>& check_names();

struct CheckSpec {
  std::string name;
  double epsilon = 0.1;
};

CheckResult run_check(const Analysis& a, const CheckSpec& spec);
CheckReport report(std::string scenario, std::vector<CheckResult> checks);
/// Every check with default parameters.
CheckReport check_all(const Analysis& a, double epsilon = 0.1);

/// Least-squares slope of ys against ts.
double fit_slope(const std::vector<double>& ts, const std::vector<double>& ys);

/// Sup over t in [0, t_max] and x of log(det(class path at t) / rho(x)).
double comparison_constant(const flow::Scenario& scenario, double t_max);

}  // namespace kflow::verify
