// Small dense hermitian matrix kernels and the constant-class type.
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace kflow {

using Matrix = Eigen::MatrixXcd;

/// Real determinant of a hermitian matrix (closed form for n <= 3).
template <typename Derived>
double hermitian_det(const Eigen::MatrixBase<Derived>& g);

/// Smallest eigenvalue of a hermitian matrix: closed form for n <= 2,
/// iterative (self-adjoint QR) beyond.
template <typename Derived>
double hermitian_min_eigenvalue(const Eigen::MatrixBase<Derived>& g);

/// Smallest and largest eigenvalue.
template <typename Derived>
std::pair<double, double> hermitian_eigen_range(const Eigen::MatrixBase<Derived>& g);

/// Determinant of a general complex matrix (used for mixed-column expansions).
std::complex<double> complex_det(const Matrix& m);

/// A (1,1)-class on the torus, represented by its constant hermitian
/// coefficient matrix. The Kähler cone is the positive-definite cone.
class CohomologyClass {
public:
  CohomologyClass() = default;
  /// Throws std::invalid_argument unless square and hermitian within 1e-12
  /// (relative). The stored matrix is exactly hermitian.
  explicit CohomologyClass(const Matrix& m);

  static CohomologyClass identity(int n, double scale = 1.0);
  static CohomologyClass diagonal(std::initializer_list<double> d);

  int n() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double det() const;
  double min_eigenvalue() const;

  bool operator==(const CohomologyClass& o) const { return m_ == o.m_; }

private:
  Matrix m_;
};

CohomologyClass operator+(const CohomologyClass& a, const CohomologyClass& b);
CohomologyClass operator-(const CohomologyClass& a, const CohomologyClass& b);
CohomologyClass operator*(double c, const CohomologyClass& a);

// ---------------------------------------------------------------------------

template <typename Derived>
double hermitian_det(const Eigen::MatrixBase<Derived>& g) {
  switch (g.rows()) {
    case 1:
      return g(0, 0).real();
    case 2:
      return g(0, 0).real() * g(1, 1).real() - std::norm(g(0, 1));
    case 3: {
      const double a = g(0, 0).real(), d = g(1, 1).real(), f = g(2, 2).real();
      const auto b = g(0, 1), c = g(0, 2), e = g(1, 2);
      return a * d * f + 2.0 * (b * e * std::conj(c)).real() - a * std::norm(e) -
             d * std::norm(c) - f * std::norm(b);
    }
    default:
      return g.derived().eval().determinant().real();
  }
}

template <typename Derived>
double hermitian_min_eigenvalue(const Eigen::MatrixBase<Derived>& g) {
  if (g.rows() == 1) return g(0, 0).real();
  if (g.rows() == 2) {
    const double a = g(0, 0).real(), d = g(1, 1).real();
    const double half = 0.5 * (a - d);
    return 0.5 * (a + d) - std::sqrt(half * half + std::norm(g(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.derived().eval(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <typename Derived>
std::pair<double, double> hermitian_eigen_range(const Eigen::MatrixBase<Derived>& g) {
  if (g.rows() == 1) return {g(0, 0).real(), g(0, 0).real()};
  if (g.rows() == 2) {
    const double a = g(0, 0).real(), d = g(1, 1).real();
    const double half = 0.5 * (a - d);
    const double r = std::sqrt(half * half + std::norm(g(0, 1)));
    return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.derived().eval(), Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(g.rows() - 1)};
}

}  // namespace kflow
