#include "kflow/class_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kflow::classes {

namespace {

void require_same_dimension(const CohomologyClass& a, const CohomologyClass& b) {
  if (a.n() != b.n()) throw std::invalid_argument("class dimension mismatch");
}

// Lexicographic order on entries; used to canonicalize argument order.
bool canonical_less(const Matrix& a, const Matrix& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto x = a.data()[i], y = b.data()[i];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Sum over column assignments with prescribed multiplicities of the
// determinant of the mixed-column matrix: the coefficient of the monomial
// prod lambda_i^{m_i} in det(sum lambda_i A_i).
std::complex<double> monomial_coefficient(const std::vector<const Matrix*>& mats,
                                          std::vector<int>& remaining, Matrix& work, int column) {
  const int n = static_cast<int>(work.rows());
  if (column == n) return complex_det(work);
  std::complex<double> sum = 0.0;
  for (std::size_t g = 0; g < mats.size(); ++g) {
    if (remaining[g] == 0) continue;
    --remaining[g];
    work.col(column) = mats[g]->col(column);
    sum += monomial_coefficient(mats, remaining, work, column + 1);
    ++remaining[g];
  }
  return sum;
}

}  // namespace

CohomologyClass class_path(const CohomologyClass& l, const CohomologyClass& omega0, double t) {
  require_same_dimension(l, omega0);
  if (t < 0.0) throw std::invalid_argument("class_path: t must be nonnegative");
  const double s = std::exp(-t);
  return CohomologyClass(l.matrix() + s * (omega0.matrix() - l.matrix()));
}

bool kahler_check(const CohomologyClass& a) { return a.min_eigenvalue() > 0.0; }

bool nef_check(const CohomologyClass& a) {
  const double scale = std::max(1.0, a.matrix().cwiseAbs().maxCoeff());
  return a.min_eigenvalue() >= -1e-12 * scale;
}

double singularity_time(const CohomologyClass& l, const CohomologyClass& omega0) {
  require_same_dimension(l, omega0);
  if (!kahler_check(omega0))
    throw std::invalid_argument("singularity_time: initial class is not Kähler");
  const Matrix m = omega0.matrix() - l.matrix();
  auto lambda = [&](double s) { return hermitian_min_eigenvalue(Matrix(l.matrix() + s * m)); };

  // The smallest eigenvalue of a linear pencil is concave in s, so the
  // positive set is an interval containing s = 1.
  if (nef_check(l)) return kInfiniteTime;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (lambda(mid) > 0.0 ? hi : lo) = mid;
  }
  return -std::log(0.5 * (lo + hi));
}

double mixed_discriminant(const std::vector<CohomologyClass>& args) {
  if (args.empty()) throw std::invalid_argument("mixed_discriminant: no arguments");
  const int n = args.front().n();
  if (static_cast<int>(args.size()) != n)
    throw std::invalid_argument("mixed_discriminant: expected " + std::to_string(n) +
                                " arguments, got " + std::to_string(args.size()));
  for (const auto& a : args) require_same_dimension(a, args.front());

  // Group identical arguments, then order groups canonically.
  std::vector<const Matrix*> sorted;
  for (const auto& a : args) sorted.push_back(&a.matrix());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Matrix* a, const Matrix* b) { return canonical_less(*a, *b); });
  std::vector<const Matrix*> groups;
  std::vector<int> counts;
  for (const Matrix* m : sorted) {
    if (!groups.empty() && *groups.back() == *m) {
      ++counts.back();
    } else {
      groups.push_back(m);
      counts.push_back(1);
    }
  }
  if (groups.size() == 1) return hermitian_det(*groups.front());

  double multinomial = factorial(n);
  for (int c : counts) multinomial /= factorial(c);
  Matrix work(n, n);
  const auto coeff = monomial_coefficient(groups, counts, work, 0);
  return coeff.real() / multinomial;
}

double VolumePolynomial::operator()(double s) const {
  double v = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * s + *it;
  return v;
}

double VolumePolynomial::at_time(double t) const { return (*this)(std::exp(-t)); }

int VolumePolynomial::lowest_nonzero(double threshold) const {
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    if (std::abs(coefficients[j]) > threshold) return static_cast<int>(j);
  return degree();
}

VolumePolynomial volume_polynomial(const CohomologyClass& l, const CohomologyClass& omega0) {
  require_same_dimension(l, omega0);
  const int n = l.n();
  const Matrix m = omega0.matrix() - l.matrix();
  VolumePolynomial poly;
  poly.coefficients.assign(static_cast<std::size_t>(n + 1), 0.0);
  // Column subset S taken from M contributes s^{|S|}.
  Matrix work(n, n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    int j = 0;
    for (int c = 0; c < n; ++c) {
      const bool from_m = (mask >> c) & 1u;
      work.col(c) = from_m ? m.col(c) : l.matrix().col(c);
      j += from_m;
    }
    poly.coefficients[static_cast<std::size_t>(j)] += complex_det(work).real();
  }
  return poly;
}

int collapse_order(const CohomologyClass& l, const CohomologyClass& omega0) {
  require_same_dimension(l, omega0);
  if (!kahler_check(omega0)) throw std::invalid_argument("collapse_order: initial class is not Kähler");
  if (!nef_check(l))
    throw std::invalid_argument("collapse_order: L is not nef (finite-time singularity)");
  const int n = l.n();
  const double threshold = kVanishingThreshold * omega0.det();
  for (int k = 0; k <= n; ++k) {
    std::vector<CohomologyClass> args(static_cast<std::size_t>(n - k), l);
    args.insert(args.end(), static_cast<std::size_t>(k), omega0);
    if (mixed_discriminant(args) > threshold) return k;
  }
  return n;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace kflow::classes
