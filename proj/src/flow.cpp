#include "kflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kflow/class_calculus.hpp"

namespace kflow::flow {

std::string to_string(Gauge g) { return g == Gauge::u ? "u" : "v"; }

Gauge parse_gauge(std::string_view name) {
  if (name == "u") return Gauge::u;
  if (name == "v") return Gauge::v;
  throw std::invalid_argument("unknown gauge '" + std::string(name) + "' (expected u or v)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::positivity_breakdown: return "positivity breakdown";
    case Termination::step_underflow: return "step size underflow";
  }
  return "unknown";
}

int Scenario::k() const {
  if (k_override) return *k_override;
  if (classes::nef_check(l) && classes::kahler_check(omega0)) return classes::collapse_order(l, omega0);
  return 0;
}

void Scenario::validate() const {
  if (l.n() != grid.n() || omega0.n() != grid.n())
    throw std::invalid_argument("class dimension does not match grid dimension " +
                                std::to_string(grid.n()));
  if (!classes::kahler_check(omega0)) throw std::invalid_argument("omega0 is not positive definite");
  if (rho.size() != grid.size()) throw std::invalid_argument("rho does not live on the grid");
  if (!rho.all_finite() || rho.min() <= 0.0) throw std::invalid_argument("rho must be positive and finite");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be finite and >= 0");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be positive");
  const auto& in = integrator;
  if (!(in.rtol > 0.0) || !(in.atol > 0.0) || !(in.dt_init > 0.0) || !(in.dt_min > 0.0) ||
      !(in.pos_floor >= 0.0))
    throw std::invalid_argument("integrator settings must be positive");
  const double big_t = classes::singularity_time(l, omega0);
  if (t_max >= big_t)
    throw std::invalid_argument("t_max = " + std::to_string(t_max) +
                                " reaches the singularity time T = " + std::to_string(big_t));
  if (k_override && (*k_override < 0 || *k_override > grid.n()))
    throw std::invalid_argument("k must lie in 0..n");
  if (gauge == Gauge::v && !k_override && !classes::nef_check(l))
    throw std::invalid_argument("v-gauge needs k: L is not nef and no k was given");
}

bool Scenario::spatially_constant() const {
  return !forcing && (rho.size() == 0 || rho.max() == rho.min());
}

double gauge_offset(int k, double t) { return k * (1.0 - std::exp(-t)) - k * t; }
double gauge_offset_rate(int k, double t) { return k * std::exp(-t) - k; }

// ---------------------------------------------------------------------------

FlowModel::FlowModel(const Scenario& scenario)
    : scenario_(scenario), log_rho_(scenario.grid), k_(scenario.k()) {
  scenario_.validate();
  for (std::size_t p = 0; p < log_rho_.size(); ++p) log_rho_[p] = std::log(scenario_.rho[p]);
}

HermitianMatrixField FlowModel::metric(const ScalarField& u, double t) const {
  return form_field(classes::class_path(scenario_.l, scenario_.omega0, t), u, scenario_.backend);
}

ScalarField FlowModel::rhs(const ScalarField& u, double t) const {
  const HermitianMatrixField g = metric(u, t);
  require_positive(g, scenario_.integrator.pos_floor, t);
  ScalarField out(u.grid());
  const double shift = scenario_.gauge == Gauge::v ? k_ * t : 0.0;
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = std::log(hermitian_det(g.at(p))) - log_rho_[p] - u[p] + shift;
  }
  if (scenario_.forcing) {
    for (std::size_t p = 0; p < out.size(); ++p) {
      const auto x = u.grid().coordinates(p);
      out[p] += scenario_.forcing(x, t);
    }
  }
  return out;
}

FlowState FlowModel::initial_state() const {
  FlowState s;
  s.t = 0.0;
  s.u = ScalarField(scenario_.grid, 0.0);
  s.u_dot = rhs(s.u, 0.0);
  return s;
}

HermitianMatrixField metric(const FlowState& state, const Scenario& scenario) {
  return form_field(classes::class_path(scenario.l, scenario.omega0, state.t), state.u,
                    scenario.backend);
}

ScalarField rhs(const FlowState& state, const Scenario& scenario) {
  return FlowModel(scenario).rhs(state.u, state.t);
}

// ---------------------------------------------------------------------------

namespace {

ScalarField axpy(const ScalarField& u, double a, const ScalarField& k) {
  ScalarField out = u;
  for (std::size_t p = 0; p < out.size(); ++p) out[p] += a * k[p];
  return out;
}

}  // namespace

ScalarField rk4_step(const FlowModel& model, const ScalarField& u, const ScalarField& u_dot,
                     double t, double dt) {
  const ScalarField& k1 = u_dot;
  const ScalarField k2 = model.rhs(axpy(u, 0.5 * dt, k1), t + 0.5 * dt);
  const ScalarField k3 = model.rhs(axpy(u, 0.5 * dt, k2), t + 0.5 * dt);
  const ScalarField k4 = model.rhs(axpy(u, dt, k3), t + dt);
  ScalarField out = u;
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] += dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  return out;
}

StepResult step(const FlowModel& model, const FlowState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const ScalarField full = rk4_step(model, state.u, state.u_dot, state.t, dt);
  const ScalarField half = rk4_step(model, state.u, state.u_dot, state.t, 0.5 * dt);
  const ScalarField half_dot = model.rhs(half, state.t + 0.5 * dt);
  StepResult r;
  r.state.t = state.t + dt;
  r.state.u = rk4_step(model, half, half_dot, state.t + 0.5 * dt, 0.5 * dt);
  r.state.u_dot = model.rhs(r.state.u, r.state.t);
  double err = 0.0;
  for (std::size_t p = 0; p < full.size(); ++p)
    err = std::max(err, std::abs(r.state.u[p] - full[p]));
  r.error = err / 15.0;
  return r;
}

namespace {

std::size_t sample_count(const Scenario& s) {
  return static_cast<std::size_t>(std::floor(s.t_max / s.sample_dt + 1e-9)) + 1;
}

double scaled_error(const StepResult& r, const FlowState& from, const IntegratorSettings& in) {
  double scale = 0.0;
  for (std::size_t p = 0; p < from.u.size(); ++p)
    scale = std::max({scale, std::abs(from.u[p]), std::abs(r.state.u[p])});
  return r.error / (in.atol + in.rtol * scale);
}

}  // namespace

Trajectory run(const Scenario& scenario) {
  const FlowModel model(scenario);
  const auto& in = scenario.integrator;
  Trajectory traj;
  traj.scenario = scenario;

  FlowState state;
  try {
    state = model.initial_state();
  } catch (const PositivityBreach& e) {
    traj.termination = Termination::positivity_breakdown;
    traj.detail = e.what();
    return traj;
  }
  traj.samples.push_back(state);

  const std::size_t count = sample_count(scenario);
  double dt = in.dt_init;
  // A breach since the last accepted step, or a nearly degenerate metric,
  // turns an error-control underflow into a positivity breakdown.
  std::string breach;
  for (std::size_t i = 1; i < count; ++i) {
    const double target = static_cast<double>(i) * scenario.sample_dt;
    while (state.t < target) {
      const double remaining = target - state.t;
      const bool clamped = dt >= remaining;
      const double h = clamped ? remaining : dt;
      try {
        StepResult r = step(model, state, h);
        const double err = scaled_error(r, state, in);
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 4.0) : 4.0;
        if (err <= 1.0) {
          state = std::move(r.state);
          if (clamped) state.t = target;
          ++traj.accepted_steps;
          breach.clear();
          dt = (clamped && factor >= 1.0) ? std::max(dt, h * factor) : h * factor;
        } else {
          ++traj.rejected_steps;
          dt = h * factor;
          if (dt < in.dt_min) {
            const auto eig = min_eigenvalue(model.metric(state.u, state.t));
            const double lowest = eig.min();
            if (breach.empty() && lowest < std::sqrt(in.pos_floor))
              breach = "metric nearly degenerate (min eigenvalue " + std::to_string(lowest) +
                       ") at t = " + std::to_string(state.t);
            traj.termination =
                breach.empty() ? Termination::step_underflow : Termination::positivity_breakdown;
            traj.detail = breach.empty()
                              ? "error control pushed dt below dt_min at t = " + std::to_string(state.t)
                              : breach;
            return traj;
          }
        }
      } catch (const PositivityBreach& e) {
        ++traj.rejected_steps;
        breach = e.what();
        dt = 0.5 * h;
        if (dt < in.dt_min) {
          traj.termination = Termination::positivity_breakdown;
          traj.detail = e.what();
          return traj;
        }
      }
    }
    traj.samples.push_back(state);
  }
  return traj;
}

Trajectory run_fixed(const Scenario& scenario, double dt) {
  const FlowModel model(scenario);
  const double ratio = scenario.sample_dt / dt;
  const auto substeps = static_cast<long>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - static_cast<double>(substeps)) > 1e-9)
    throw std::invalid_argument("run_fixed: dt must divide sample_dt");
  Trajectory traj;
  traj.scenario = scenario;
  FlowState state = model.initial_state();
  traj.samples.push_back(state);
  const std::size_t count = sample_count(scenario);
  try {
    for (std::size_t i = 1; i < count; ++i) {
      const double t0 = static_cast<double>(i - 1) * scenario.sample_dt;
      for (long j = 0; j < substeps; ++j) {
        const double t = t0 + static_cast<double>(j) * dt;
        state.u = rk4_step(model, state.u, state.u_dot, t, dt);
        state.t = t + dt;
        state.u_dot = model.rhs(state.u, state.t);
        ++traj.accepted_steps;
      }
      state.t = static_cast<double>(i) * scenario.sample_dt;
      traj.samples.push_back(state);
    }
  } catch (const PositivityBreach& e) {
    traj.termination = Termination::positivity_breakdown;
    traj.detail = e.what();
  }
  return traj;
}

Trajectory gauge_shift(const Trajectory& u_trajectory, int k) {
  if (u_trajectory.scenario.gauge != Gauge::u)
    throw std::invalid_argument("gauge_shift: trajectory is not in the u-gauge");
  Trajectory out = u_trajectory;
  out.scenario.gauge = Gauge::v;
  out.scenario.k_override = k;
  for (auto& s : out.samples) {
    s.u += -gauge_offset(k, s.t);
    s.u_dot += -gauge_offset_rate(k, s.t);
  }
  return out;
}

FlowState to_u_gauge(const FlowState& state, const Scenario& scenario) {
  if (scenario.gauge == Gauge::u) return state;
  const int k = scenario.k();
  FlowState out = state;
  out.u += gauge_offset(k, state.t);
  out.u_dot += gauge_offset_rate(k, state.t);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<OracleSample> homogeneous_oracle(const CohomologyClass& l,
                                             const CohomologyClass& omega0, double rho, int k,
                                             Gauge gauge, std::span<const double> times) {
  if (!(rho > 0.0)) throw std::invalid_argument("oracle: rho must be positive");
  const classes::VolumePolynomial vol = classes::volume_polynomial(l, omega0);
  const double log_rho = std::log(rho);
  const double shift = gauge == Gauge::v ? 1.0 : 0.0;
  std::vector<OracleSample> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("oracle: negative time");
    double w = 0.0;
    if (t > 0.0) {
      // Solution of w' + w = g(s), w(0) = 0: w(t) = int_0^t e^{s - t} g(s) ds.
      auto integrand = [&](double s) {
        return std::exp(s - t) * (std::log(vol.at_time(s)) - log_rho + shift * k * s);
      };
      w = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 20,
                                                                        1e-13);
    }
    const double f = gauge_offset(k, t);
    if (gauge == Gauge::u) {
      out.push_back({t, w, f, w - f});
    } else {
      out.push_back({t, w + f, f, w});
    }
  }
  return out;
}

}  // namespace kflow::flow
