// Shared scenario builders, random generators and independent oracles for
// the test binaries.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "kflow/flow.hpp"
#include "kflow/verify.hpp"

namespace kt {

using kflow::CohomologyClass;
using kflow::Matrix;
using kflow::PeriodicGrid;
using kflow::ScalarField;
using kflow::flow::Scenario;

inline constexpr double kPi = std::numbers::pi;

inline Scenario collapsed_homogeneous(int resolution = 8, double t_max = 10.0) {
  Scenario s;
  s.name = "collapsed_homogeneous";
  s.grid = PeriodicGrid(2, {0}, resolution);
  s.l = CohomologyClass::diagonal({1, 0});
  s.omega0 = CohomologyClass::identity(2);
  s.rho = ScalarField(s.grid, 1.0);
  s.t_max = t_max;
  return s;
}

inline Scenario collapsed_varying(int resolution = 128, double t_max = 12.0) {
  Scenario s = collapsed_homogeneous(resolution, t_max);
  s.name = "collapsed_varying";
  s.rho = ScalarField::sample(s.grid, [](std::span<const double> x) {
    return std::exp(0.3 * std::cos(x[0]));
  });
  s.rho *= 1.0 / s.rho.mean();
  return s;
}

inline Scenario kahler(double t_max = 10.0) {
  Scenario s = collapsed_homogeneous(8, t_max);
  s.name = "kahler";
  s.l = CohomologyClass::identity(2);
  s.omega0 = CohomologyClass::identity(2, 2.0);
  return s;
}

/// Closed form for the homogeneous collapsed scenario.
inline double collapsed_u(double t) { return 1.0 - t - std::exp(-t); }

/// Deterministic random source for property tests.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a = -1.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(gen_);
  }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }

  Matrix hermitian(int n, double scale = 1.0) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = scale * uniform();
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = {scale * uniform(), scale * uniform()};
        m(j, i) = std::conj(m(i, j));
      }
    }
    return m;
  }
  /// B B^* + shift I.
  Matrix positive(int n, double shift = 0.5) {
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = {uniform(), uniform()};
    return b * b.adjoint() + shift * Matrix::Identity(n, n);
  }

  /// Random trigonometric polynomial of degree <= max_k in the given axes,
  /// returned as a callable on the 2n real coordinates.
  std::function<double(std::span<const double>)> trig(const std::vector<int>& axes, int max_k,
                                                      double amplitude) {
    struct Term {
      int a, b, ka, kb;
      double c, phase;
    };
    std::vector<Term> terms;
    for (int i = 0; i < 6; ++i) {
      const int a = axes[integer(0, static_cast<int>(axes.size()) - 1)];
      const int b = axes[integer(0, static_cast<int>(axes.size()) - 1)];
      terms.push_back({a, b, integer(0, max_k), integer(0, max_k), amplitude * uniform() / 6.0,
                       uniform(0.0, 2.0 * kPi)});
    }
    return [terms](std::span<const double> x) {
      double s = 0.0;
      for (const auto& t : terms) s += t.c * std::cos(t.ka * x[t.a] + t.kb * x[t.b] + t.phase);
      return s;
    };
  }

private:
  std::mt19937_64 gen_;
};

/// Dense central-difference oracle for second derivatives of a callable,
/// independent of the library's differentiation code.
inline double fd_second(const std::function<double(std::span<const double>)>& f,
                        std::vector<double> x, int a, int b, double h = 1e-4) {
  auto at = [&](double da, double db) {
    auto y = x;
    y[a] += da;
    y[b] += db;
    return f(y);
  };
  if (a == b) return (at(h, 0) - 2.0 * f(x) + at(-h, 0)) / (h * h);
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
}

/// Complex Hessian of a callable from fd_second, on n complex coordinates.
inline Matrix fd_complex_hessian(const std::function<double(std::span<const double>)>& f,
                                 const std::vector<double>& x, int n) {
  Matrix h(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double re = fd_second(f, x, j, k) + fd_second(f, x, n + j, n + k);
      const double im = j == k ? 0.0 : fd_second(f, x, j, n + k) - fd_second(f, x, n + j, k);
      h(j, k) = {0.25 * re, 0.25 * im};
    }
  return h;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) d = std::max(d, std::abs(a[p] - b[p]));
  return d;
}

// Manufactured solution on the Kähler classes L = I, omega_0 = 2I, rho = 1;
// forcing = du*/dt - (log det g(u*) - u*).
inline Scenario manufactured(int resolution, std::function<double(double, double)> ustar,
                             std::function<double(double, double)> ustar_t,
                             std::function<double(double, double)> ustar_xx, double t_max) {
  Scenario s = kahler(t_max);
  s.grid = PeriodicGrid(2, {0}, resolution);
  s.rho = ScalarField(s.grid, 1.0);
  s.forcing = [=](std::span<const double> x, double t) {
    const double w = 1.0 + std::exp(-t);
    const double g11 = w + 0.25 * ustar_xx(x[0], t);
    return ustar_t(x[0], t) - (std::log(g11 * w) - ustar(x[0], t));
  };
  return s;
}

inline double manufactured_error(const kflow::flow::Trajectory& tr,
                                 const std::function<double(double, double)>& ustar) {
  double err = 0.0;
  for (const auto& st : tr.samples)
    for (std::size_t p = 0; p < st.u.size(); ++p)
      err = std::max(err, std::abs(st.u[p] - ustar(tr.scenario.grid.coordinate(p, 0), st.t)));
  return err;
}

/// Largest |centered FD of cached du/dt - analytic rate| over samples with
/// t in [t0, t1].
inline double rate_discrepancy(const kflow::flow::Trajectory& tr, double t0, double t1) {
  const auto fd = kflow::verify::udot_rate_fd(tr);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < tr.samples.size(); ++i) {
    const auto& st = tr.samples[i];
    if (st.t < t0 - 1e-12 || st.t > t1 + 1e-12) continue;
    const auto analytic = kflow::verify::udot_rate_analytic(
        kflow::flow::to_u_gauge(st, tr.scenario), tr.scenario, tr.scenario.backend);
    worst = std::max(worst, max_abs_diff(fd[i], analytic));
  }
  return worst;
}

}  // namespace kt
