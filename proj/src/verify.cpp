#include "kflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kflow/class_calculus.hpp"

namespace kflow::verify {

using flow::FlowState;
using flow::Scenario;
using flow::Trajectory;

namespace {

constexpr double kWindowEps = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fit_offset_margin(double m) { return kFitMargin * std::max(std::abs(m), 1.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<FlowState> u_gauge_samples(const Trajectory& tr) {
  std::vector<FlowState> out;
  out.reserve(tr.samples.size());
  for (const auto& s : tr.samples) out.push_back(flow::to_u_gauge(s, tr.scenario));
  return out;
}

std::vector<ScalarField> rates_of(const std::vector<FlowState>& s) {
  std::vector<ScalarField> out;
  const std::size_t m = s.size();
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    ScalarField r(s[i].u_dot.grid());
    if (m >= 3) {
      for (std::size_t p = 0; p < r.size(); ++p) {
        if (i == 0) {
          const double h = s[1].t - s[0].t;
          r[p] = (-3.0 * s[0].u_dot[p] + 4.0 * s[1].u_dot[p] - s[2].u_dot[p]) / (2.0 * h);
        } else if (i == m - 1) {
          const double h = s[m - 1].t - s[m - 2].t;
          r[p] = (3.0 * s[m - 1].u_dot[p] - 4.0 * s[m - 2].u_dot[p] + s[m - 3].u_dot[p]) / (2.0 * h);
        } else {
          r[p] = (s[i + 1].u_dot[p] - s[i - 1].u_dot[p]) / (s[i + 1].t - s[i - 1].t);
        }
      }
    } else if (m == 2) {
      for (std::size_t p = 0; p < r.size(); ++p)
        r[p] = (s[1].u_dot[p] - s[0].u_dot[p]) / (s[1].t - s[0].t);
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool forced(const Analysis& a) { return static_cast<bool>(a.trajectory->scenario.forcing); }

CheckResult inconclusive(CheckResult r, std::string why) {
  r.verdict = Verdict::inconclusive;
  r.note = std::move(why);
  return r;
}

// Indices of the late window [t_end - width, t_end], never reaching into burn-in.
std::vector<std::size_t> late_window(const Analysis& a, double width) {
  std::vector<std::size_t> idx;
  if (a.rows.empty()) return idx;
  const double t_end = a.rows.back().t;
  const double start = std::max(t_end - width, kBurnInEnd);
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    if (a.rows[i].t >= start - kWindowEps) idx.push_back(i);
  return idx;
}

template <typename F>
double window_slope(const Analysis& a, const std::vector<std::size_t>& idx, F&& value) {
  std::vector<double> ts, ys;
  for (std::size_t i : idx) {
    ts.push_back(a.rows[i].t);
    ys.push_back(value(a.rows[i]));
  }
  return fit_slope(ts, ys);
}

bool in_burn_in(const DiagnosticsRow& r) { return r.t <= kBurnInEnd + kWindowEps; }

struct DecayFit {
  double c = 0.0;        // for d2u/dt2 + du/dt <= C e^{-t}
  double c_prime = 0.0;  // for du/dt <= C' e^{-t/2}
};

DecayFit fit_decay(const Analysis& a) {
  DecayFit f;
  for (const auto& r : a.rows) {
    if (!in_burn_in(r)) continue;
    f.c = std::max(f.c, std::exp(r.t) * std::max(0.0, r.max_uddot_plus_udot));
    f.c_prime = std::max(f.c_prime, std::exp(0.5 * r.t) * std::max(0.0, r.max_udot));
  }
  f.c *= 1.0 + kFitMargin;
  f.c_prime *= 1.0 + kFitMargin;
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ScalarField> udot_rate_fd(const Trajectory& trajectory) {
  return rates_of(u_gauge_samples(trajectory));
}

ScalarField udot_rate_analytic(const FlowState& u_state, const Scenario& scenario,
                               Backend backend) {
  const auto a_t = classes::class_path(scenario.l, scenario.omega0, u_state.t);
  const HermitianMatrixField g = form_field(a_t, u_state.u, backend);
  const HermitianMatrixField direction(scenario.grid, scenario.omega0.matrix() - scenario.l.matrix());
  ScalarField out = laplacian(g, u_state.u_dot, backend);
  const ScalarField tr = trace_pair(g, direction);
  const double e = std::exp(-u_state.t);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] -= e * tr[p] + u_state.u_dot[p];
  return out;
}

DiagnosticsRow diagnostics(const FlowState& s, const ScalarField& udot_rate,
                           const Scenario& scenario, const ScalarField& phi, Backend backend) {
  const int n = scenario.n();
  const int k = scenario.k();
  const double t = s.t;
  DiagnosticsRow r;
  r.t = t;
  r.max_u = s.u.max();
  r.min_u = s.u.min();
  r.mean_u = s.u.mean();
  r.max_udot = s.u_dot.max();
  r.min_udot = s.u_dot.min();
  r.osc_u = r.max_u - r.min_u;

  const ScalarField sum = s.u_dot + s.u;
  r.max_udot_plus_u = sum.max();
  r.min_udot_plus_u = sum.min();
  r.mean_udot_plus_u = sum.mean();
  const ScalarField second = udot_rate + s.u_dot;
  r.max_uddot_plus_udot = second.max();
  r.min_uddot_plus_udot = second.min();

  const auto a_t = classes::class_path(scenario.l, scenario.omega0, t);
  r.class_volume = a_t.det();

  const ScalarField& rho = scenario.rho;
  const double rho_mean = rho.mean();
  double vol = 0.0, jensen = 0.0;
  for (std::size_t p = 0; p < sum.size(); ++p) {
    vol += std::exp(sum[p]) * rho[p];
    jensen += sum[p] * rho[p];
  }
  const double m = static_cast<double>(sum.size());
  r.volume_integral = vol / m;
  // Normalizing rho to unit mass shifts u by (1 - e^{-t}) log(mean rho); the
  // integral below is taken in that gauge.
  r.jensen_lhs = jensen / m / rho_mean + std::log(rho_mean);

  const HermitianMatrixField g = form_field(a_t, s.u, backend);
  r.min_eig_metric = min_eigenvalue(g).min();
  try {
    const HermitianMatrixField ric = ricci_of_metric(g, backend);
    r.ric_min = std::numeric_limits<double>::infinity();
    r.ric_max = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < ric.size(); ++p) {
      const auto [lo, hi] = hermitian_eigen_range(ric.at(p));
      r.ric_min = std::min(r.ric_min, lo);
      r.ric_max = std::max(r.ric_max, hi);
    }
  } catch (const PositivityBreach&) {
    r.ric_min = r.ric_max = kNaN;
  }

  const double f = flow::gauge_offset(k, t);
  r.lower_bound_min = std::numeric_limits<double>::infinity();
  r.conjecture_min = std::numeric_limits<double>::infinity();
  r.max_abs_v = 0.0;
  for (std::size_t p = 0; p < sum.size(); ++p) {
    r.lower_bound_min = std::min(r.lower_bound_min, sum[p] + n * t - phi[p]);
    r.conjecture_min = std::min(r.conjecture_min, s.u[p] + k * t - phi[p]);
    r.max_abs_v = std::max(r.max_abs_v, std::abs(s.u[p] - f));
  }
  return r;
}

void require_psh(const Scenario& scenario, const ScalarField& phi, Backend backend) {
  if (phi.size() != scenario.grid.size()) throw std::invalid_argument("phi does not live on the grid");
  const HermitianMatrixField form = form_field(scenario.l, phi, backend);
  const double lowest = min_eigenvalue(form).min();
  const double scale = std::max(1.0, scenario.l.matrix().cwiseAbs().maxCoeff());
  if (lowest < -1e-10 * scale)
    throw std::invalid_argument("phi is not L-plurisubharmonic on the grid (min eigenvalue " +
                                fmt(lowest) + ")");
}

Analysis analyze(const Trajectory& trajectory, std::optional<ScalarField> phi,
                 std::optional<Backend> backend) {
  const Scenario& sc = trajectory.scenario;
  const Backend b = backend.value_or(sc.backend);
  Analysis a;
  a.trajectory = &trajectory;
  a.phi = phi ? std::move(*phi) : ScalarField(sc.grid, 0.0);
  try {
    require_psh(sc, a.phi, b);
  } catch (const std::invalid_argument&) {
    a.phi_admissible = false;
  }
  a.n = sc.n();
  a.k = sc.k();
  a.rho_mean = sc.rho.mean();
  const auto states = u_gauge_samples(trajectory);
  const auto rates = rates_of(states);
  a.rows.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    a.rows.push_back(diagnostics(states[i], rates[i], sc, a.phi, b));
  return a;
}

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
  }
  return "unknown";
}

bool CheckReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.failed(); });
}

const CheckResult* CheckReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double fit_slope(const std::vector<double>& ts, const std::vector<double>& ys) {
  const std::size_t m = ts.size();
  if (m < 2 || ys.size() != m) return kNaN;
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += (ts[i] - mt) * (ys[i] - my);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  return den > 0.0 ? num / den : kNaN;
}

double comparison_constant(const Scenario& scenario, double t_max) {
  const auto poly = classes::volume_polynomial(scenario.l, scenario.omega0);
  const double s_lo = std::exp(-t_max);
  // Dense scan of det(L + s M) on [e^{-t_max}, 1], refined by golden section
  // around the best sample.
  constexpr int kSamples = 20000;
  double best_s = 1.0, best = poly(1.0);
  for (int i = 0; i <= kSamples; ++i) {
    const double s = s_lo + (1.0 - s_lo) * i / kSamples;
    const double v = poly(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  const double width = (1.0 - s_lo) / kSamples;
  double a = std::max(s_lo, best_s - width), b = std::min(1.0, best_s + width);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    (poly(c) > poly(d) ? b : a) = (poly(c) > poly(d) ? d : c);
  }
  best = std::max({best, poly(0.5 * (a + b))});
  double min_log_rho = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < scenario.rho.size(); ++p)
    min_log_rho = std::min(min_log_rho, std::log(scenario.rho[p]));
  return std::log(best) - min_log_rho;
}

// ---------------------------------------------------------------------------

CheckResult check_upper_bound_u(const Analysis& a) {
  CheckResult r;
  r.name = "upper_bound_u";
  r.anchor = "u <= max(0, K), K = sup log(det omega_t / rho)";
  if (forced(a)) return inconclusive(r, "forced run");
  const double big_k = comparison_constant(a.trajectory->scenario, a.rows.back().t);
  const double bound = std::max(0.0, big_k);
  r.fitted_constants["K"] = big_k;
  r.burn_in = {0.0, 0.0};
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows) {
    const double margin = bound + kNumericalTolerance - row.max_u;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.evidence = {{row.t, row.max_u}};
    }
  }
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_second_derivative_decay(const Analysis& a) {
  CheckResult r;
  r.name = "second_derivative_decay";
  r.anchor = "d2u/dt2 + du/dt <= C e^{-t}; du/dt <= C' e^{-t/2}";
  if (forced(a)) return inconclusive(r, "forced run");
  const auto& sc = a.trajectory->scenario;
  if (sc.sample_dt > 1.0 / 3.0 + 1e-12)
    return inconclusive(r, "needs at least 3 samples per unit time");
  const DecayFit fit = fit_decay(a);
  r.fitted_constants["C"] = fit.c;
  r.fitted_constants["C_prime"] = fit.c_prime;
  r.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& row : a.rows) {
    if (in_burn_in(row)) continue;
    any = true;
    const double m1 = fit.c * std::exp(-row.t) + kNumericalTolerance - row.max_uddot_plus_udot;
    const double m2 = fit.c_prime * std::exp(-0.5 * row.t) + kNumericalTolerance - row.max_udot;
    const double m = std::min(m1, m2);
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.evidence = {{row.t, m1 < m2 ? row.max_uddot_plus_udot : row.max_udot}};
    }
  }
  if (!any) return inconclusive(r, "no samples after burn-in");
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_monotone(const Analysis& a) {
  CheckResult r;
  r.name = "monotone";
  r.anchor = "u + 2C' e^{-t/2} and du/dt + u + C e^{-t} non-increasing";
  if (forced(a)) return inconclusive(r, "forced run");
  if (a.rows.size() < 2) return inconclusive(r, "fewer than two samples");
  const DecayFit fit = fit_decay(a);
  r.fitted_constants["C"] = fit.c;
  r.fitted_constants["C_prime"] = fit.c_prime;
  auto potential = [&](const DiagnosticsRow& row) {
    return row.max_u + 2.0 * fit.c_prime * std::exp(-0.5 * row.t);
  };
  auto volume = [&](const DiagnosticsRow& row) {
    return row.max_udot_plus_u + fit.c * std::exp(-row.t);
  };
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < a.rows.size(); ++i) {
    const double m1 = potential(a.rows[i - 1]) - potential(a.rows[i]) + kMonotoneTolerance;
    const double m2 = volume(a.rows[i - 1]) - volume(a.rows[i]) + kMonotoneTolerance;
    const double m = std::min(m1, m2);
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.evidence = {{a.rows[i].t, m}};
    }
  }
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_volume_identity(const Analysis& a) {
  CheckResult r;
  r.name = "volume_identity";
  r.anchor = "int e^{du/dt + u} Omega = [omega_t]^n";
  if (forced(a)) return inconclusive(r, "forced run");
  r.burn_in = {0.0, 0.0};
  const double scale = a.rows.front().class_volume;
  const double tol = kNumericalTolerance * scale;
  r.fitted_constants["tolerance"] = tol;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows) {
    const double m = tol - std::abs(row.volume_integral - row.class_volume);
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.evidence = {{row.t, row.volume_integral - row.class_volume}};
    }
  }
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_jensen_upper(const Analysis& a) {
  CheckResult r;
  r.name = "jensen_upper";
  r.anchor = "int (du/dt + u) Omega <= log [omega_t]^n <= -k t + C";
  if (forced(a)) return inconclusive(r, "forced run");
  if (std::abs(a.rho_mean - 1.0) > 1e-12)
    r.note = "rho normalized to unit mass; gauge shift (1 - e^{-t}) log " + fmt(a.rho_mean);

  double fit = -std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows)
    if (in_burn_in(row)) fit = std::max(fit, row.jensen_lhs + a.k * row.t);
  const double c = fit + fit_offset_margin(fit);
  r.fitted_constants["C"] = c;
  r.fitted_constants["k"] = a.k;

  r.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& row : a.rows) {
    // Convexity holds at every sample, burn-in included.
    double m = std::log(row.volume_integral) + kJensenTolerance - row.jensen_lhs;
    m = std::min(m, std::log(row.class_volume) + kNumericalTolerance - row.jensen_lhs);
    if (!in_burn_in(row)) {
      any = true;
      m = std::min(m, c - a.k * row.t + kNumericalTolerance - row.jensen_lhs);
    }
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.evidence = {{row.t, row.jensen_lhs}};
    }
  }
  if (!any) return inconclusive(r, "no samples after burn-in");
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_lower_bound(const Analysis& a) {
  CheckResult r;
  r.name = "lower_bound";
  r.anchor = "du/dt + u + n t >= phi + C";
  if (forced(a)) return inconclusive(r, "forced run");
  if (!a.phi_admissible) return inconclusive(r, "phi is not L-plurisubharmonic");
  double fit = std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows)
    if (in_burn_in(row)) fit = std::min(fit, row.lower_bound_min);
  const double c = fit - fit_offset_margin(fit);
  r.fitted_constants["C"] = c;
  r.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  double running = std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows) {
    running = std::min(running, row.lower_bound_min);
    if (in_burn_in(row)) continue;
    any = true;
    r.worst_margin = std::min(r.worst_margin, row.lower_bound_min - c + kNumericalTolerance);
  }
  // Running minimum curve, thinned to whole times.
  running = std::numeric_limits<double>::infinity();
  double next = 0.0;
  for (const auto& row : a.rows) {
    running = std::min(running, row.lower_bound_min);
    if (row.t >= next - kWindowEps) {
      r.evidence.emplace_back(row.t, running);
      next += 1.0;
    }
  }
  if (!any) return inconclusive(r, "no samples after burn-in");
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_derivative_sequence(const Analysis& a, double epsilon) {
  CheckResult r;
  r.name = "derivative_sequence";
  r.anchor = "max_X du/dt >= -n - eps along times tending to infinity";
  if (!(epsilon > 0.0)) throw std::invalid_argument("derivative_sequence: epsilon must be positive");
  if (forced(a)) return inconclusive(r, "forced run");
  const double threshold = -a.n - epsilon;
  r.fitted_constants["epsilon"] = epsilon;
  r.fitted_constants["threshold"] = threshold;
  r.burn_in = {0.0, 0.0};
  // For every window [T0, t_max] with T0 >= 1, the best sample in it.
  double suffix_best = -std::numeric_limits<double>::infinity();
  double witness_t = kNaN;
  r.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (auto it = a.rows.rbegin(); it != a.rows.rend(); ++it) {
    if (it->t < kBurnInEnd - kWindowEps) break;
    any = true;
    if (it->max_udot > suffix_best) {
      suffix_best = it->max_udot;
      witness_t = it->t;
      if (suffix_best >= threshold) r.evidence.emplace_back(witness_t, suffix_best);
    }
    r.worst_margin = std::min(r.worst_margin, suffix_best - threshold);
  }
  std::reverse(r.evidence.begin(), r.evidence.end());
  if (!any) return inconclusive(r, "no samples at t >= 1");
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_semiample_asymptotic(const Analysis& a, std::optional<int> k_in) {
  CheckResult r;
  r.name = "semiample_asymptotic";
  r.anchor = "u ~ -k t with |u - f(t)| bounded";
  if (forced(a)) return inconclusive(r, "forced run");
  const int k = k_in.value_or(a.k);
  if (a.rows.back().t < 10.0 - kWindowEps) return inconclusive(r, "needs t_max >= 10");
  const auto idx = late_window(a, 4.0);
  const double slope = window_slope(a, idx, [](const DiagnosticsRow& row) { return row.mean_u; });
  const double v_slope = window_slope(a, idx, [](const DiagnosticsRow& row) { return row.max_abs_v; });
  double v_max = 0.0;
  for (const auto& row : a.rows) v_max = std::max(v_max, row.max_abs_v);
  r.fitted_constants["k"] = k;
  r.fitted_constants["slope"] = slope;
  r.fitted_constants["v_bound"] = v_max;
  r.fitted_constants["v_slope"] = v_slope;
  r.burn_in = {a.rows[idx.front()].t, a.rows.back().t};
  const double m1 = 0.05 - std::abs(slope + k);
  const double m2 = 0.01 - std::abs(v_slope);
  r.worst_margin = std::min(m1, m2);
  r.evidence = {{a.rows[idx.front()].t, a.rows[idx.front()].mean_u}, {a.rows.back().t, a.rows.back().mean_u}};
  r.verdict = r.worst_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

CheckResult check_conjecture(const Analysis& a) {
  CheckResult r;
  r.name = "conjecture";
  r.anchor = "du/dt >= -C and u >= -k t - C + phi";
  r.asserting = false;
  if (forced(a)) return inconclusive(r, "forced run");
  if (!a.phi_admissible) return inconclusive(r, "phi is not L-plurisubharmonic");
  const auto idx = late_window(a, 4.0);
  if (idx.size() < 2) return inconclusive(r, "no late window");
  const double s1 = window_slope(a, idx, [](const DiagnosticsRow& row) { return row.min_udot; });
  const double s2 = window_slope(a, idx, [](const DiagnosticsRow& row) { return row.conjecture_min; });
  double lowest_udot = std::numeric_limits<double>::infinity();
  double lowest_u = std::numeric_limits<double>::infinity();
  for (const auto& row : a.rows) {
    lowest_udot = std::min(lowest_udot, row.min_udot);
    lowest_u = std::min(lowest_u, row.conjecture_min);
  }
  r.fitted_constants["k"] = a.k;
  r.fitted_constants["udot_min"] = lowest_udot;
  r.fitted_constants["udot_min_slope"] = s1;
  r.fitted_constants["u_plus_kt_min"] = lowest_u;
  r.fitted_constants["u_plus_kt_min_slope"] = s2;
  r.burn_in = {a.rows[idx.front()].t, a.rows.back().t};
  r.worst_margin = std::min(s1, s2) + 0.01;
  r.verdict = r.worst_margin >= 0.0 ? Verdict::consistent : Verdict::violated;
  if (r.verdict == Verdict::violated)
    r.note = "VIOLATION: late-time decreasing trend; solver bug or counterexample candidate";
  return r;
}

CheckResult probe_limits(const Analysis& a) {
  CheckResult r;
  r.name = "limits";
  r.anchor = "u(., infinity) = lim (du/dt + u)";
  r.asserting = false;
  const auto idx = late_window(a, 4.0);
  if (idx.size() < 2) return inconclusive(r, "no late window");
  const double su = window_slope(a, idx, [](const DiagnosticsRow& row) { return row.mean_u; });
  const double sv =
      window_slope(a, idx, [](const DiagnosticsRow& row) { return row.mean_udot_plus_u; });
  auto classify = [](double s) {
    if (s < -0.1) return std::string("diverging");
    if (std::abs(s) <= 0.01) return std::string("stable");
    return std::string("drifting");
  };
  r.fitted_constants["u_slope"] = su;
  r.fitted_constants["udot_plus_u_slope"] = sv;
  r.burn_in = {a.rows[idx.front()].t, a.rows.back().t};
  r.note = "u " + classify(su) + ", du/dt + u " + classify(sv);
  r.worst_margin = -std::abs(su - sv);
  r.verdict = classify(su) == classify(sv) ? Verdict::consistent : Verdict::violated;
  return r;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "upper_bound_u", "second_derivative_decay", "monotone",  "volume_identity",
      "jensen_upper",  "lower_bound",             "derivative_sequence",
      "semiample_asymptotic", "conjecture",       "limits"};
  return names;
}

CheckResult run_check(const Analysis& a, const CheckSpec& spec) {
  const std::string& n = spec.name;
  if (n == "upper_bound_u") return check_upper_bound_u(a);
  if (n == "second_derivative_decay") return check_second_derivative_decay(a);
  if (n == "monotone") return check_monotone(a);
  if (n == "volume_identity") return check_volume_identity(a);
  if (n == "jensen_upper") return check_jensen_upper(a);
  if (n == "lower_bound") return check_lower_bound(a);
  if (n == "derivative_sequence") return check_derivative_sequence(a, spec.epsilon);
  if (n == "semiample_asymptotic") return check_semiample_asymptotic(a);
  if (n == "conjecture") return check_conjecture(a);
  if (n == "limits") return probe_limits(a);
  throw std::invalid_argument("unknown check '" + n + "'");
}

CheckReport report(std::string scenario, std::vector<CheckResult> checks) {
  CheckReport rep;
  rep.scenario = std::move(scenario);
  rep.checks = std::move(checks);
  return rep;
}

CheckReport check_all(const Analysis& a, double epsilon) {
  std::vector<CheckResult> out;
  for (const auto& name : check_names()) out.push_back(run_check(a, {name, epsilon}));
  return report(a.trajectory->scenario.name, std::move(out));
}

}  // namespace kflow::verify
