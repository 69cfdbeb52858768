// Time integration of the scalar potential flow
//
//   du/dt = log(det(omega_t + i dd-bar u) / rho) - u,     u(., 0) = 0,
//
// with omega_t = L + e^{-t} (omega_0 - L), and of its shifted variant
// (v-gauge) dv/dt = log(det(...) / rho) - v + k t, which describes the same
// metric flow with u = v + f(t), f' + f = -k t, f(0) = 0.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kflow/differentiation.hpp"
#include "kflow/geometry.hpp"
#include "kflow/grid.hpp"
#include "kflow/hermitian.hpp"

namespace kflow::flow {

enum class Gauge { u, v };

std::string to_string(Gauge g);
Gauge parse_gauge(std::string_view name);

struct IntegratorSettings {
  double rtol = 1e-12;
  double atol = 1e-14;
  double dt_init = 1e-3;
  double dt_min = 1e-7;
  double pos_floor = 1e-8;  ///< smallest admissible metric eigenvalue

  bool operator==(const IntegratorSettings&) const = default;
};

/// Space-time source term added to the right-hand side. Test-only: used for
/// manufactured solutions, never in estimate verification.
using Forcing = std::function<double(std::span<const double> coords, double t)>;

struct Scenario {
  std::string name = "scenario";
  PeriodicGrid grid;
  CohomologyClass l;
  CohomologyClass omega0;
  ScalarField rho;
  Gauge gauge = Gauge::u;
  std::optional<int> k_override;
  double t_max = 10.0;
  double sample_dt = 0.05;
  Forcing forcing;
  IntegratorSettings integrator;
  Backend backend = Backend::spectral;

  int n() const { return grid.n(); }
  /// k_override, else the collapse order of (L, omega_0), else 0 when L is not nef.
  int k() const;
  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
  bool spatially_constant() const;
};

struct FlowState {
  double t = 0.0;
  ScalarField u;      ///< potential in the scenario's gauge
  ScalarField u_dot;  ///< right-hand side evaluated at (u, t)
};

enum class Termination { completed, positivity_breakdown, step_underflow };
std::string to_string(Termination t);

struct Trajectory {
  Scenario scenario;
  std::vector<FlowState> samples;
  Termination termination = Termination::completed;
  std::string detail;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  double final_time() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// The spatially constant gauge shift f(t) = k (1 - e^{-t}) - k t and its rate.
double gauge_offset(int k, double t);
double gauge_offset_rate(int k, double t);

/// Evaluates the flow right-hand side for one scenario with cached
/// per-scenario data (log rho, class matrices, effective k).
class FlowModel {
public:
  explicit FlowModel(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  int k() const { return k_; }

  /// omega_t + i dd-bar u.
  HermitianMatrixField metric(const ScalarField& u, double t) const;
  /// Throws PositivityBreach when the metric's smallest eigenvalue at any
  /// point is <= pos_floor.
  ScalarField rhs(const ScalarField& u, double t) const;

  FlowState initial_state() const;

private:
  Scenario scenario_;
  ScalarField log_rho_;
  int k_;
};

HermitianMatrixField metric(const FlowState& state, const Scenario& scenario);
ScalarField rhs(const FlowState& state, const Scenario& scenario);

/// One classical RK4 step of size dt from (u, t) with k1 = u_dot supplied.
ScalarField rk4_step(const FlowModel& model, const ScalarField& u, const ScalarField& u_dot,
                     double t, double dt);

struct StepResult {
  FlowState state;      ///< result of two half steps
  double error = 0.0;   ///< max |two half steps - one full step| / 15
};

/// Step-doubled RK4 step. Throws PositivityBreach if any stage leaves the cone.
StepResult step(const FlowModel& model, const FlowState& state, double dt);

/// Adaptive integration to t_max with samples every sample_dt.
Trajectory run(const Scenario& scenario);

/// Fixed-step classical RK4 (no error control); dt must divide sample_dt.
Trajectory run_fixed(const Scenario& scenario, double dt);

/// Re-expresses a u-gauge trajectory in the v-gauge: v = u - f(t).
Trajectory gauge_shift(const Trajectory& u_trajectory, int k);

/// Potential and its time derivative in the u-gauge for any sample.
FlowState to_u_gauge(const FlowState& state, const Scenario& scenario);

struct OracleSample {
  double t;
  double u;
  double f;
  double v;
};

/// Reference solution for spatially constant data: u' + u = log(det A_t / rho)
/// (+ k t in the v-gauge), u(0) = 0, solved by the integrating factor and
/// adaptive Gauss-Kronrod quadrature.
std::vector<OracleSample> homogeneous_oracle(const CohomologyClass& l,
                                             const CohomologyClass& omega0, double rho, int k,
                                             Gauge gauge, std::span<const double> times);

}  // namespace kflow::flow
