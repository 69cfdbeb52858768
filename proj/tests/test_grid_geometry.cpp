#include <doctest.h>

#include <cmath>

#include "kflow/differentiation.hpp"
#include "kflow/geometry.hpp"
#include "support.hpp"

using namespace kflow;
using kt::kPi;

namespace {

ScalarField cos_x1(const PeriodicGrid& g, double amp = 1.0) {
  return ScalarField::sample(g, [amp](std::span<const double> x) { return amp * std::cos(x[0]); });
}

double max_hermitian_defect(const HermitianMatrixField& h) {
  double d = 0.0;
  for (std::size_t p = 0; p < h.size(); ++p)
    d = std::max(d, (h.at(p) - h.at(p).adjoint()).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(PeriodicGrid(0, {0}, 8), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(2, {0}, 7), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(2, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(2, {4}, 8), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(2, {0, 0}, 8), std::invalid_argument);
  PeriodicGrid g(2, {0, 3}, 8);
  CHECK(g.size() == 64);
  CHECK(g.is_active(3));
  CHECK_FALSE(g.is_active(1));
  CHECK(g.axis_name(3) == "y2");
  CHECK(PeriodicGrid::parse_axis("y1", 2) == 2);
  CHECK_THROWS(PeriodicGrid::parse_axis("x3", 2));
  CHECK(g.spacing() == doctest::Approx(2.0 * kPi / 8));
}

TEST_CASE("grid coordinates cover each active axis uniformly") {
  PeriodicGrid g(2, {1, 2}, 4);
  std::vector<int> hits(16, 0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = g.coordinates(p);
    CHECK(x[0] == 0.0);
    CHECK(x[3] == 0.0);
    const int i = static_cast<int>(std::lround(x[1] / g.spacing()));
    const int j = static_cast<int>(std::lround(x[2] / g.spacing()));
    ++hits[static_cast<std::size_t>(4 * i + j)];
  }
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("scalar fields reject non-finite values") {
  PeriodicGrid g(1, {0}, 4);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>{0, 1, NAN, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>{0, 1, 2}), std::invalid_argument);
  ScalarField f(g, 1.0);
  f[2] = INFINITY;
  CHECK_THROWS_AS(complex_hessian(f), std::invalid_argument);
}

TEST_CASE("spectral derivatives are exact on band-limited trig polynomials") {
  kt::Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    PeriodicGrid g(2, {0, 3}, 16);
    // Degree <= N/2 - 1 in each axis.
    const double c1 = rng.uniform(), c2 = rng.uniform(), ph = rng.uniform(0, 2 * kPi);
    auto f = [&](std::span<const double> x) {
      return c1 * std::sin(3 * x[0] + ph) * std::cos(7 * x[3]) + c2 * std::cos(7 * x[0] - 2 * x[3]);
    };
    auto fx = [&](std::span<const double> x) {
      return 3 * c1 * std::cos(3 * x[0] + ph) * std::cos(7 * x[3]) -
             7 * c2 * std::sin(7 * x[0] - 2 * x[3]);
    };
    auto fxy = [&](std::span<const double> x) {
      return -21 * c1 * std::cos(3 * x[0] + ph) * std::sin(7 * x[3]) +
             14 * c2 * std::cos(7 * x[0] - 2 * x[3]);
    };
    auto fyy = [&](std::span<const double> x) {
      return -49 * c1 * std::sin(3 * x[0] + ph) * std::cos(7 * x[3]) -
             4 * c2 * std::cos(7 * x[0] - 2 * x[3]);
    };
    const auto v = ScalarField::sample(g, f);
    const auto d1 = derivative(g, v.values(), 0, 1, Backend::spectral);
    const auto dxy = mixed_derivative(g, v.values(), 0, 3, Backend::spectral);
    const auto dyy = derivative(g, v.values(), 3, 2, Backend::spectral);
    const auto e1 = ScalarField::sample(g, fx), exy = ScalarField::sample(g, fxy),
               eyy = ScalarField::sample(g, fyy);
    for (std::size_t p = 0; p < g.size(); ++p) {
      CHECK(std::abs(d1[p] - e1[p]) <= 1e-10);
      CHECK(std::abs(dxy[p] - exy[p]) <= 1e-10);
      CHECK(std::abs(dyy[p] - eyy[p]) <= 1e-10);
    }
    const auto dz = derivative(g, v.values(), 1, 1, Backend::spectral);
    for (double d : dz) CHECK(d == 0.0);
  }
}

TEST_CASE("fd4 derivatives converge at fourth order") {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    PeriodicGrid g(1, {0}, n);
    const auto v = ScalarField::sample(g, [](std::span<const double> x) { return std::exp(std::sin(x[0])); });
    const auto d = derivative(g, v.values(), 0, 1, Backend::fd4);
    double err = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double x = g.coordinate(p, 0);
      err = std::max(err, std::abs(d[p] - std::cos(x) * std::exp(std::sin(x))));
    }
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("complex_hessian examples") {
  PeriodicGrid g1(1, {0}, 16);
  const auto zero = complex_hessian(ScalarField(g1, 0.0));
  for (std::size_t p = 0; p < zero.size(); ++p) CHECK(std::abs(zero.at(p)(0, 0)) == 0.0);

  const auto h1 = complex_hessian(cos_x1(g1));
  for (std::size_t p = 0; p < g1.size(); ++p) {
    const double x = g1.coordinate(p, 0);
    CHECK(std::abs(h1.at(p)(0, 0) - std::complex<double>(-0.25 * std::cos(x), 0)) <= 1e-12);
  }

  PeriodicGrid g2(2, {0}, 16);
  const auto h2 = complex_hessian(cos_x1(g2));
  for (std::size_t p = 0; p < g2.size(); ++p) {
    const double x = g2.coordinate(p, 0);
    CHECK(std::abs(h2.at(p)(0, 0).real() + 0.25 * std::cos(x)) <= 1e-12);
    CHECK(std::abs(h2.at(p)(0, 1)) == 0.0);
    CHECK(std::abs(h2.at(p)(1, 0)) == 0.0);
    CHECK(std::abs(h2.at(p)(1, 1)) == 0.0);
  }
}

TEST_CASE("complex_hessian matches a dense finite-difference oracle on mixed axes") {
  kt::Rng rng(5);
  PeriodicGrid g(2, {0, 1, 2, 3}, 8);
  const auto f = rng.trig({0, 1, 2, 3}, 3, 0.5);
  const auto h = complex_hessian(ScalarField::sample(g, f));
  for (std::size_t p = 0; p < g.size(); p += 37) {
    const Matrix oracle = kt::fd_complex_hessian(f, g.coordinates(p), 2);
    CHECK((Matrix(h.at(p)) - oracle).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("hermitian closure and zero-mean Hessian for random fields") {
  kt::Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    PeriodicGrid g(2, {0, 1, 3}, 8);
    const auto phi = ScalarField::sample(g, rng.trig({0, 1, 3}, 3, 1.0));
    for (Backend b : {Backend::spectral, Backend::fd4}) {
      const auto h = complex_hessian(phi, b);
      CHECK(max_hermitian_defect(h) == 0.0);
      CHECK(h.hermitian_defect() <= 1e-12);
      CHECK(h.mean().cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("form_field examples") {
  PeriodicGrid g(2, {0}, 16);
  const auto id = form_field(CohomologyClass::identity(2), ScalarField(g, 0.0));
  for (std::size_t p = 0; p < g.size(); ++p) CHECK(Matrix(id.at(p)) == Matrix::Identity(2, 2));

  const auto f = form_field(CohomologyClass::diagonal({1, 0}), cos_x1(g));
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.coordinate(p, 0);
    CHECK(std::abs(f.at(p)(0, 0).real() - (1 - 0.25 * std::cos(x))) <= 1e-12);
    CHECK(std::abs(f.at(p)(1, 1)) == 0.0);
  }
  CHECK_THROWS_AS(form_field(CohomologyClass::identity(3), ScalarField(g, 0.0)),
                  std::invalid_argument);

  kt::Rng rng(3);
  const CohomologyClass a(rng.hermitian(2));
  const auto m = form_field(a, ScalarField::sample(g, rng.trig({0}, 5, 1.0)));
  CHECK((m.mean() - a.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ma_determinant and min_eigenvalue examples") {
  PeriodicGrid g(2, {0}, 4);
  const HermitianMatrixField id(g, Matrix::Identity(2, 2));
  CHECK(ma_determinant(id).min() == 1.0);
  CHECK(min_eigenvalue(id).max() == 1.0);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = std::exp(-1.0);
  CHECK(ma_determinant(HermitianMatrixField(g, d))[0] == doctest::Approx(0.367879441171).epsilon(1e-12));
  d(1, 1) = std::exp(-2.0);
  CHECK(min_eigenvalue(HermitianMatrixField(g, d))[0] == doctest::Approx(0.135335283237).epsilon(1e-12));

  Matrix m(2, 2);
  m << 2.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 2.0;
  CHECK(std::abs(ma_determinant(HermitianMatrixField(g, m))[0] - 3.0) <= 1e-14);
  CHECK(std::abs(min_eigenvalue(HermitianMatrixField(g, m))[0] - 1.0) <= 1e-14);
}

TEST_CASE("hermitian kernels agree with Eigen for n = 1..4") {
  kt::Rng rng(13);
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix m = rng.hermitian(n, 2.0);
      const double det = m.determinant().real();
      const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
      CHECK(hermitian_det(m) == doctest::Approx(det).epsilon(1e-10).scale(1.0));
      CHECK(hermitian_min_eigenvalue(m) == doctest::Approx(lmin).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("trace_pair examples") {
  PeriodicGrid g(2, {0}, 4);
  const HermitianMatrixField id(g, Matrix::Identity(2, 2));
  CHECK(trace_pair(id, id)[0] == 2.0);
  const double t = 1.7;
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = std::exp(-t);
  b(1, 1) = 1;
  CHECK(trace_pair(HermitianMatrixField(g, a), HermitianMatrixField(g, b))[0] ==
        doctest::Approx(std::exp(t)).epsilon(1e-13));
  const HermitianMatrixField two(g, 2.0 * Matrix::Identity(2, 2));
  CHECK(trace_pair(two, id)[0] == doctest::Approx(1.0).epsilon(1e-15));

  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1;
  CHECK_THROWS_AS(trace_pair(HermitianMatrixField(g, singular), id), PositivityBreach);
}

TEST_CASE("trace normalization holds for random admissible metrics") {
  kt::Rng rng(17);
  PeriodicGrid g(2, {0, 2}, 8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto gm = form_field(CohomologyClass(rng.positive(2, 1.0)),
                               ScalarField::sample(g, rng.trig({0, 2}, 2, 0.3)));
    REQUIRE(min_eigenvalue(gm).min() > 0.0);
    CHECK(integrate(trace_pair(gm, gm)) == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("laplacian examples") {
  PeriodicGrid g(1, {0}, 16);
  const HermitianMatrixField id(g, Matrix::Identity(1, 1));
  const HermitianMatrixField two(g, 2.0 * Matrix::Identity(1, 1));
  CHECK(laplacian(id, ScalarField(g, 3.0)).max() == 0.0);
  const auto f = cos_x1(g);
  const auto l1 = laplacian(id, f), l2 = laplacian(two, f);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double x = g.coordinate(p, 0);
    CHECK(std::abs(l1[p] + 0.25 * std::cos(x)) <= 1e-12);
    CHECK(std::abs(l2[p] + 0.125 * std::cos(x)) <= 1e-12);
  }
}

TEST_CASE("ricci_of_density examples") {
  PeriodicGrid g1(1, {0}, 16);
  CHECK(ricci_of_density(ScalarField(g1, 1.0)).mean().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(ricci_of_density(ScalarField(g1, 0.0)), std::invalid_argument);
  const auto rho = ScalarField::sample(g1, [](std::span<const double> x) { return std::exp(std::cos(x[0])); });
  const auto ric = ricci_of_density(rho);
  for (std::size_t p = 0; p < g1.size(); ++p)
    CHECK(std::abs(ric.at(p)(0, 0).real() - 0.25 * std::cos(g1.coordinate(p, 0))) <= 1e-12);
  const auto c = ricci_of_density(ScalarField(g1, 7.5));
  for (std::size_t p = 0; p < g1.size(); ++p) CHECK(std::abs(c.at(p)(0, 0)) <= 1e-15);
}

TEST_CASE("ricci_of_density is invariant under constant rescaling") {
  kt::Rng rng(19);
  PeriodicGrid g(2, {0, 3}, 8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto logr = rng.trig({0, 3}, 3, 0.5);
    const auto rho = ScalarField::sample(g, [&](std::span<const double> x) { return std::exp(logr(x)); });
    const double c = rng.uniform(0.1, 10.0);
    const auto a = ricci_of_density(rho), b = ricci_of_density(c * rho);
    CHECK(a.mean().cwiseAbs().maxCoeff() <= 1e-12);
    for (std::size_t p = 0; p < g.size(); ++p)
      CHECK((Matrix(a.at(p)) - Matrix(b.at(p))).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("ricci_of_metric examples") {
  PeriodicGrid g(2, {0}, 64);
  const HermitianMatrixField flat(g, 3.0 * Matrix::Identity(2, 2));
  CHECK(ricci_of_metric(flat).mean().cwiseAbs().maxCoeff() == 0.0);

  const auto gm = form_field(CohomologyClass::diagonal({1, 1}), cos_x1(g));
  const auto ric = ricci_of_metric(gm);
  // log det = log(1 - cos(x1)/4); oracle by dense differences of the closed form.
  auto logdet = [](std::span<const double> x) { return std::log(1.0 - 0.25 * std::cos(x[0])); };
  for (std::size_t p = 0; p < g.size(); p += 5) {
    const Matrix oracle = -kt::fd_complex_hessian(logdet, g.coordinates(p), 2);
    CHECK((Matrix(ric.at(p)) - oracle).cwiseAbs().maxCoeff() <= 1e-6);
  }
  HermitianMatrixField scaled = gm;
  scaled *= 4.0;
  const auto ric2 = ricci_of_metric(scaled);
  for (std::size_t p = 0; p < g.size(); ++p)
    CHECK((Matrix(ric.at(p)) - Matrix(ric2.at(p))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("integrate examples") {
  PeriodicGrid g(2, {0}, 16);
  CHECK(integrate(ScalarField(g, 2.5)) == 2.5);
  CHECK(std::abs(integrate(cos_x1(g))) <= 1e-15);
  auto rho = ScalarField::sample(g, [](std::span<const double> x) { return 2.0 + std::sin(x[0]); });
  rho *= 1.0 / rho.mean();
  CHECK(integrate(ScalarField(g, 1.0), rho) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mean determinant equals the class volume for random potentials") {
  kt::Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    PeriodicGrid g(2, {0, 1, 2}, 8);
    const CohomologyClass a(rng.positive(2, 1.0));
    const auto gm = form_field(a, ScalarField::sample(g, rng.trig({0, 1, 2}, 3, 0.3)));
    REQUIRE(min_eigenvalue(gm).min() > 0.0);
    CHECK(std::abs(ma_determinant(gm).mean() - a.det()) <= 1e-8);
  }
}

TEST_CASE("require_positive reports the worst point") {
  PeriodicGrid g(1, {0}, 8);
  const auto gm = form_field(CohomologyClass::identity(1, 0.2), cos_x1(g));
  try {
    require_positive(gm, 1e-8, 0.5);
    FAIL("expected a breach");
  } catch (const PositivityBreach& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-0.05));
    CHECK(e.time() == 0.5);
  }
}
