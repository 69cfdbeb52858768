#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kflow/class_calculus.hpp"
#include "support.hpp"

using namespace kflow;
using namespace kflow::classes;

namespace {

// Polarization oracle: D(A_1..A_n) = (1/n!) sum over subsets S of
// (-1)^{n-|S|} det(sum_{i in S} A_i). Independent of the library's expansion.
double polarization(const std::vector<Matrix>& a) {
  const int n = static_cast<int>(a.size());
  double sum = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    Matrix s = Matrix::Zero(n, n);
    int bits = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        s += a[static_cast<std::size_t>(i)];
        ++bits;
      }
    sum += ((n - bits) % 2 ? -1.0 : 1.0) * s.determinant().real();
  }
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return sum / fact;
}

std::vector<CohomologyClass> classes_of(const std::vector<Matrix>& ms) {
  std::vector<CohomologyClass> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

}  // namespace

TEST_CASE("class_path examples") {
  const auto l = CohomologyClass::diagonal({1, 0});
  const auto w = CohomologyClass::identity(2);
  CHECK(class_path(l, w, 0.0) == w);
  CHECK(class_path(w, w, 3.7) == w);
  const auto p = class_path(l, w, 1.0);
  CHECK(std::abs(p.matrix()(0, 0).real() - 1.0) <= 1e-15);
  CHECK(std::abs(p.matrix()(1, 1).real() - std::exp(-1.0)) <= 1e-15);
  CHECK_THROWS_AS(class_path(l, CohomologyClass::identity(3), 1.0), std::invalid_argument);
}

TEST_CASE("kahler_check examples") {
  CHECK(kahler_check(CohomologyClass::identity(2)));
  CHECK_FALSE(kahler_check(CohomologyClass::diagonal({1, 0})));
  Matrix m(2, 2);
  m << 2.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 2.0;
  CHECK(kahler_check(CohomologyClass(m)));
  CHECK(nef_check(CohomologyClass::diagonal({1, 0})));
  CHECK_FALSE(nef_check(CohomologyClass::diagonal({2, -1})));
}

TEST_CASE("classes reject non-hermitian input") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(CohomologyClass{m}, std::invalid_argument);
  CHECK_THROWS_AS(CohomologyClass{Matrix(2, 3)}, std::invalid_argument);
}

TEST_CASE("singularity_time examples") {
  const auto w = CohomologyClass::identity(2);
  CHECK(singularity_time(CohomologyClass::diagonal({1, 0}), w) == kInfiniteTime);
  CHECK(std::abs(singularity_time(CohomologyClass::diagonal({2, -1}), w) - std::log(2.0)) <= 1e-10);
  CHECK(singularity_time(w, w) == kInfiniteTime);
  CHECK_THROWS_AS(singularity_time(w, CohomologyClass::diagonal({1, 0})), std::invalid_argument);
}

TEST_CASE("singularity_time matches closed forms on random diagonal paths") {
  kt::Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(2, 3);
    std::vector<double> l(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    double expected = kInfiniteTime;
    Matrix lm = Matrix::Zero(n, n), wm = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double li = rng.uniform(-2.0, 2.0), wi = rng.uniform(0.2, 2.0);
      lm(i, i) = li;
      wm(i, i) = wi;
      // l + s (w - l) = 0 at s = l / (l - w) when l < 0.
      if (li < 0.0) expected = std::min(expected, -std::log(li / (li - wi)));
    }
    const double got = singularity_time(CohomologyClass(lm), CohomologyClass(wm));
    if (std::isinf(expected))
      CHECK(std::isinf(got));
    else
      CHECK(std::abs(got - expected) <= 1e-10);
  }
}

TEST_CASE("singularity_time is invariant under unitary conjugation") {
  kt::Rng rng(31);
  const Matrix u = Eigen::HouseholderQR<Matrix>(rng.positive(2)).householderQ();
  Matrix l = Matrix::Zero(2, 2);
  l(0, 0) = 2;
  l(1, 1) = -1;
  const Matrix ul = u * l * u.adjoint();
  CHECK(std::abs(singularity_time(CohomologyClass(ul), CohomologyClass::identity(2)) - std::log(2.0)) <= 1e-10);
}

TEST_CASE("mixed_discriminant examples") {
  const auto i2 = CohomologyClass::identity(2);
  const auto l = CohomologyClass::diagonal({1, 0});
  CHECK(mixed_discriminant({l, i2}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mixed_discriminant({i2, i2}) == 1.0);
  CHECK_THROWS_AS(mixed_discriminant({i2}), std::invalid_argument);
  CHECK_THROWS_AS(mixed_discriminant({i2, i2, i2}), std::invalid_argument);
}

TEST_CASE("mixed_discriminant properties over random hermitian tuples") {
  kt::Rng rng(37);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Matrix> ms;
      for (int i = 0; i < n; ++i) ms.push_back(rng.hermitian(n, 2.0));
      const auto args = classes_of(ms);
      const double d = mixed_discriminant(args);

      CHECK(std::abs(d - polarization(ms)) <= 1e-10);

      auto perm = args;
      std::sort(perm.begin(), perm.end(), [](const CohomologyClass& a, const CohomologyClass& b) {
        return a.matrix()(0, 0).real() < b.matrix()(0, 0).real();
      });
      do {
        CHECK(mixed_discriminant(perm) == d);
      } while (std::next_permutation(perm.begin(), perm.end(),
                                     [](const CohomologyClass& a, const CohomologyClass& b) {
                                       return a.matrix()(0, 0).real() < b.matrix()(0, 0).real();
                                     }));

      const Matrix b = rng.hermitian(n, 2.0);
      const double alpha = rng.uniform(-3, 3), beta = rng.uniform(-3, 3);
      const int slot = rng.integer(0, n - 1);
      auto mixed = args, with_b = args;
      mixed[static_cast<std::size_t>(slot)] = CohomologyClass(alpha * ms[static_cast<std::size_t>(slot)] + beta * b);
      with_b[static_cast<std::size_t>(slot)] = CohomologyClass(b);
      CHECK(std::abs(mixed_discriminant(mixed) -
                     (alpha * d + beta * mixed_discriminant(with_b))) <= 1e-10);

      const CohomologyClass a(ms[0]);
      CHECK(mixed_discriminant(std::vector<CohomologyClass>(static_cast<std::size_t>(n), a)) == a.det());

      std::vector<CohomologyClass> psd;
      for (int i = 0; i < n; ++i) psd.emplace_back(rng.positive(n, 0.0));
      CHECK(mixed_discriminant(psd) >= 0.0);
    }
  }
}

TEST_CASE("collapse_order examples") {
  const auto i2 = CohomologyClass::identity(2);
  CHECK(collapse_order(i2, i2) == 0);
  CHECK(collapse_order(CohomologyClass(Matrix::Zero(2, 2)), i2) == 2);
  CHECK(collapse_order(CohomologyClass::diagonal({1, 0}), i2) == 1);
  CHECK(collapse_order(CohomologyClass(Matrix::Zero(3, 3)), CohomologyClass::identity(3)) == 3);
  CHECK_THROWS_AS(collapse_order(CohomologyClass::diagonal({2, -1}), i2), std::invalid_argument);
}

TEST_CASE("volume_polynomial examples") {
  const auto i2 = CohomologyClass::identity(2);
  auto p = volume_polynomial(CohomologyClass::diagonal({1, 0}), i2);
  CHECK(p.coefficients == std::vector<double>{0.0, 1.0, 0.0});
  p = volume_polynomial(i2, CohomologyClass::identity(2, 2.0));
  REQUIRE(p.coefficients.size() == 3);
  CHECK(p.coefficients[0] == doctest::Approx(1.0));
  CHECK(p.coefficients[1] == doctest::Approx(2.0));
  CHECK(p.coefficients[2] == doctest::Approx(1.0));
  p = volume_polynomial(CohomologyClass(Matrix::Zero(2, 2)), i2);
  CHECK(p.coefficients == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(p.at_time(1.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("volume polynomial consistency with mixed discriminants and collapse order") {
  kt::Rng rng(41);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 50; ++trial) {
      // Nef L of random rank, Kähler omega_0.
      Matrix b = Matrix::Zero(n, n);
      const int rank = rng.integer(0, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) b(i, j) = {rng.uniform(), rng.uniform()};
      const CohomologyClass l(b * b.adjoint());
      const CohomologyClass w(rng.positive(n));
      const auto m = w - l;
      const auto poly = volume_polynomial(l, w);
      for (int j = 0; j <= n; ++j) {
        std::vector<CohomologyClass> args(static_cast<std::size_t>(n - j), l);
        args.insert(args.end(), static_cast<std::size_t>(j), m);
        CHECK(std::abs(poly.coefficients[static_cast<std::size_t>(j)] -
                       binomial(n, j) * mixed_discriminant(args)) <= 1e-10);
      }
      CHECK(std::abs(poly(1.0) - w.det()) <= 1e-10);
      CHECK(std::abs(poly(0.0) - l.det()) <= 1e-10);
      const int k = collapse_order(l, w);
      CHECK(k == poly.lowest_nonzero(kVanishingThreshold * w.det()));
      CHECK(k == n - rank);
      const double s = rng.uniform(0.0, 1.0);
      CHECK(std::abs(poly(s) - (l + s * m).det()) <= 1e-10);
    }
  }
}
