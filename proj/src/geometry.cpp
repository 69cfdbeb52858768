#include "kflow/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kflow {

namespace {

std::string breach_message(double lambda, std::size_t point, double t) {
  std::ostringstream os;
  os << "positivity breach: min eigenvalue " << lambda << " at point " << point << ", t = " << t;
  return os.str();
}

}  // namespace

PositivityBreach::PositivityBreach(double min_eigenvalue, std::size_t point, double t)
    : std::runtime_error(breach_message(min_eigenvalue, point, t)),
      min_eigenvalue_(min_eigenvalue),
      point_(point),
      t_(t) {}

HermitianMatrixField complex_hessian(const ScalarField& phi, Backend backend) {
  phi.require_finite("complex_hessian");
  const PeriodicGrid& grid = phi.grid();
  const int n = grid.n();
  HermitianMatrixField h(grid);
  if (grid.active_count() == 0) return h;

  // Real Hessian on active axes, computed once per unordered pair so that
  // the assembled matrix is exactly hermitian.
  const int dim = 2 * n;
  std::vector<std::vector<double>> hess(static_cast<std::size_t>(dim * dim));
  auto entry = [&](Axis a, Axis b) -> const std::vector<double>& {
    if (a > b) std::swap(a, b);
    auto& slot = hess[static_cast<std::size_t>(a * dim + b)];
    if (slot.empty()) slot = mixed_derivative(grid, phi.values(), a, b, backend);
    return slot;
  };
  const std::vector<double> zero(grid.size(), 0.0);
  auto d2 = [&](Axis a, Axis b) -> const std::vector<double>& {
    return (grid.is_active(a) && grid.is_active(b)) ? entry(a, b) : zero;
  };

  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const Axis xj = j, yj = n + j, xk = k, yk = n + k;
      const auto& xx = d2(xj, xk);
      const auto& yy = d2(yj, yk);
      const auto& xy = d2(xj, yk);
      const auto& yx = d2(yj, xk);
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double re = 0.25 * (xx[p] + yy[p]);
        const double im = (j == k) ? 0.0 : 0.25 * (xy[p] - yx[p]);
        auto m = h.at(p);
        m(j, k) = {re, im};
        m(k, j) = {re, -im};
      }
    }
  }
  return h;
}

HermitianMatrixField form_field(const CohomologyClass& a, const ScalarField& phi,
                                Backend backend) {
  if (a.n() != phi.grid().n()) throw std::invalid_argument("form_field: dimension mismatch");
  HermitianMatrixField g = complex_hessian(phi, backend);
  for (std::size_t p = 0; p < g.size(); ++p) g.at(p) += a.matrix();
  return g;
}

ScalarField ma_determinant(const HermitianMatrixField& g) {
  std::vector<double> v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) v[p] = hermitian_det(g.at(p));
  return ScalarField(g.grid(), std::move(v));
}

ScalarField min_eigenvalue(const HermitianMatrixField& g) {
  std::vector<double> v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) v[p] = hermitian_min_eigenvalue(g.at(p));
  return ScalarField(g.grid(), std::move(v));
}

ScalarField trace_pair(const HermitianMatrixField& g, const HermitianMatrixField& alpha) {
  if (g.size() != alpha.size() || g.n() != alpha.n())
    throw std::invalid_argument("trace_pair: field mismatch");
  std::vector<double> v(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    Eigen::LLT<Matrix> llt(g.at(p));
    if (llt.info() != Eigen::Success) throw PositivityBreach(hermitian_min_eigenvalue(g.at(p)), p);
    v[p] = llt.solve(Matrix(alpha.at(p))).trace().real();
  }
  return ScalarField(g.grid(), std::move(v));
}

ScalarField laplacian(const HermitianMatrixField& g, const ScalarField& f, Backend backend) {
  return trace_pair(g, complex_hessian(f, backend));
}

HermitianMatrixField ricci_of_density(const ScalarField& rho, Backend backend) {
  rho.require_finite("ricci_of_density");
  ScalarField log_rho(rho.grid());
  for (std::size_t p = 0; p < rho.size(); ++p) {
    if (!(rho[p] > 0.0)) throw std::invalid_argument("ricci_of_density: density must be positive");
    log_rho[p] = std::log(rho[p]);
  }
  HermitianMatrixField ric = complex_hessian(log_rho, backend);
  ric *= -1.0;
  return ric;
}

HermitianMatrixField ricci_of_metric(const HermitianMatrixField& g, Backend backend) {
  ScalarField log_det(g.grid());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double d = hermitian_det(g.at(p));
    if (!(d > 0.0)) throw PositivityBreach(hermitian_min_eigenvalue(g.at(p)), p);
    log_det[p] = std::log(d);
  }
  HermitianMatrixField ric = complex_hessian(log_det, backend);
  ric *= -1.0;
  return ric;
}

double integrate(const ScalarField& f, const std::optional<ScalarField>& w) {
  double s = 0.0;
  if (w) {
    if (w->size() != f.size()) throw std::invalid_argument("integrate: size mismatch");
    for (std::size_t p = 0; p < f.size(); ++p) s += f[p] * (*w)[p];
  } else {
    for (std::size_t p = 0; p < f.size(); ++p) s += f[p];
  }
  return s / static_cast<double>(f.size());
}

void require_positive(const HermitianMatrixField& g, double floor, double t) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double l = hermitian_min_eigenvalue(g.at(p));
    if (!(l >= worst)) {
      worst = l;
      where = p;
    }
  }
  if (!(worst > floor)) throw PositivityBreach(worst, where, t);
}

}  // namespace kflow
