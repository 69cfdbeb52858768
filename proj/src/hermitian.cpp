#include "kflow/hermitian.hpp"

#include <stdexcept>

namespace kflow {

std::complex<double> complex_det(const Matrix& m) {
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.determinant();
  }
}

CohomologyClass::CohomologyClass(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("class: matrix must be square and non-empty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("class: matrix is not hermitian");
  if (!m.allFinite()) throw std::invalid_argument("class: non-finite entry");
  m_ = 0.5 * (m + m.adjoint());
}

CohomologyClass CohomologyClass::identity(int n, double scale) {
  return CohomologyClass(Matrix::Identity(n, n) * scale);
}

CohomologyClass CohomologyClass::diagonal(std::initializer_list<double> d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return CohomologyClass(m);
}

double CohomologyClass::det() const { return hermitian_det(m_); }
double CohomologyClass::min_eigenvalue() const { return hermitian_min_eigenvalue(m_); }

CohomologyClass operator+(const CohomologyClass& a, const CohomologyClass& b) {
  if (a.n() != b.n()) throw std::invalid_argument("class: dimension mismatch");
  return CohomologyClass(a.matrix() + b.matrix());
}

CohomologyClass operator-(const CohomologyClass& a, const CohomologyClass& b) {
  if (a.n() != b.n()) throw std::invalid_argument("class: dimension mismatch");
  return CohomologyClass(a.matrix() - b.matrix());
}

CohomologyClass operator*(double c, const CohomologyClass& a) {
  return CohomologyClass(c * a.matrix());
}

}  // namespace kflow
