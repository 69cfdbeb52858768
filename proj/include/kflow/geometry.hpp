// Pointwise Kähler geometry on periodic grids.
//
// Conventions: z_j = x_j + i y_j, d/dz_j = (d/dx_j - i d/dy_j) / 2, and the
// coefficient matrix of i dd-bar f is H_jk = d^2 f / dz_j dz-bar_k. A metric is
// a positive-definite HermitianMatrixField g; its volume ratio against the
// Euclidean form is det g.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "kflow/differentiation.hpp"
#include "kflow/grid.hpp"
#include "kflow/hermitian.hpp"

namespace kflow {

/// Raised when a field that must be a metric fails positive definiteness.
class PositivityBreach : public std::runtime_error {
public:
  PositivityBreach(double min_eigenvalue, std::size_t point, double t = 0.0);
  double min_eigenvalue() const { return min_eigenvalue_; }
  std::size_t point() const { return point_; }
  double time() const { return t_; }

private:
  double min_eigenvalue_;
  std::size_t point_;
  double t_;
};

/// Coefficient matrix of i dd-bar phi. Exactly hermitian; every component
/// has zero grid mean up to round-off.
HermitianMatrixField complex_hessian(const ScalarField& phi, Backend backend = Backend::spectral);

/// A + complex_hessian(phi): the form representing class A with potential phi.
HermitianMatrixField form_field(const CohomologyClass& a, const ScalarField& phi,
                                Backend backend = Backend::spectral);

ScalarField ma_determinant(const HermitianMatrixField& g);
ScalarField min_eigenvalue(const HermitianMatrixField& g);

/// <g, alpha> = tr(g^{-1} alpha). Throws PositivityBreach where g is singular.
ScalarField trace_pair(const HermitianMatrixField& g, const HermitianMatrixField& alpha);

/// Delta_g f = tr(g^{-1} complex_hessian(f)).
ScalarField laplacian(const HermitianMatrixField& g, const ScalarField& f,
                      Backend backend = Backend::spectral);

/// Ric(rho dmu) = -i dd-bar log rho. Throws std::invalid_argument for rho <= 0.
HermitianMatrixField ricci_of_density(const ScalarField& rho, Backend backend = Backend::spectral);

/// Ric(g) = -i dd-bar log det g.
HermitianMatrixField ricci_of_metric(const HermitianMatrixField& g,
                                     Backend backend = Backend::spectral);

/// Normalized-Haar average of f * w (w defaults to 1), summed in index order.
double integrate(const ScalarField& f, const std::optional<ScalarField>& w = std::nullopt);

/// Throws PositivityBreach at the point of smallest eigenvalue if it is <= floor.
void require_positive(const HermitianMatrixField& g, double floor, double t = 0.0);

}  // namespace kflow
