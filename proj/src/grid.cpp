#include "kflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kflow {

PeriodicGrid::PeriodicGrid(int n, std::vector<Axis> active_axes, int resolution)
    : n_(n), active_(std::move(active_axes)), resolution_(resolution) {
  if (n_ < 1) throw std::invalid_argument("grid: complex dimension must be >= 1");
  if (resolution_ < 4 || resolution_ % 2 != 0)
    throw std::invalid_argument("grid: resolution must be even and >= 4, got " +
                                std::to_string(resolution_));
  std::sort(active_.begin(), active_.end());
  if (std::adjacent_find(active_.begin(), active_.end()) != active_.end())
    throw std::invalid_argument("grid: repeated active axis");
  for (Axis a : active_)
    if (a < 0 || a >= 2 * n_) throw std::invalid_argument("grid: axis out of range");
  size_ = 1;
  for (std::size_t i = 0; i < active_.size(); ++i) size_ *= static_cast<std::size_t>(resolution_);
}

bool PeriodicGrid::is_active(Axis axis) const { return slot_of(axis) >= 0; }

int PeriodicGrid::slot_of(Axis axis) const {
  auto it = std::find(active_.begin(), active_.end(), axis);
  return it == active_.end() ? -1 : static_cast<int>(it - active_.begin());
}

double PeriodicGrid::spacing() const { return 2.0 * std::numbers::pi / resolution_; }

std::size_t PeriodicGrid::stride(int slot) const {
  std::size_t s = 1;
  for (int i = active_count() - 1; i > slot; --i) s *= static_cast<std::size_t>(resolution_);
  return s;
}

std::size_t PeriodicGrid::index_along(std::size_t point, int slot) const {
  return (point / stride(slot)) % static_cast<std::size_t>(resolution_);
}

double PeriodicGrid::coordinate(std::size_t point, Axis axis) const {
  const int slot = slot_of(axis);
  if (slot < 0) return 0.0;
  return spacing() * static_cast<double>(index_along(point, slot));
}

std::vector<double> PeriodicGrid::coordinates(std::size_t point) const {
  std::vector<double> c(static_cast<std::size_t>(2 * n_), 0.0);
  for (int slot = 0; slot < active_count(); ++slot)
    c[static_cast<std::size_t>(active_[slot])] =
        spacing() * static_cast<double>(index_along(point, slot));
  return c;
}

std::string PeriodicGrid::axis_name(Axis axis) const {
  return (axis < n_ ? "x" : "y") + std::to_string(axis % n_ + 1);
}

Axis PeriodicGrid::parse_axis(std::string_view name, int n) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y'))
    throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
  int j = 0;
  for (char c : name.substr(1)) {
    if (c < '0' || c > '9') throw std::invalid_argument("unknown axis '" + std::string(name) + "'");
    j = 10 * j + (c - '0');
  }
  if (j < 1 || j > n)
    throw std::invalid_argument("axis '" + std::string(name) + "' outside dimension " +
                                std::to_string(n));
  return name[0] == 'x' ? j - 1 : n + j - 1;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(PeriodicGrid grid, double value)
    : grid_(std::move(grid)), values_(grid_.size(), value) {}

ScalarField::ScalarField(PeriodicGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("scalar field: value count does not match grid");
  require_finite("scalar field");
}

ScalarField ScalarField::sample(const PeriodicGrid& grid,
                                const std::function<double(std::span<const double>)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto c = grid.coordinates(p);
    v[p] = f(c);
  }
  return ScalarField(grid, std::move(v));
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

std::size_t ScalarField::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) -
                                  values_.begin());
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ScalarField::require_finite(std::string_view what) const {
  if (!all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (other.size() != size()) throw std::invalid_argument("scalar field: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (other.size() != size()) throw std::invalid_argument("scalar field: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator+(ScalarField a, double c) { return a += c; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

// ---------------------------------------------------------------------------

HermitianMatrixField::HermitianMatrixField(PeriodicGrid grid)
    : grid_(std::move(grid)),
      data_(grid_.size() * static_cast<std::size_t>(grid_.n() * grid_.n())) {}

HermitianMatrixField::HermitianMatrixField(PeriodicGrid grid, const Matrix& value)
    : HermitianMatrixField(std::move(grid)) {
  if (value.rows() != n() || value.cols() != n())
    throw std::invalid_argument("matrix field: dimension mismatch");
  for (std::size_t p = 0; p < size(); ++p) at(p) = value;
}

HermitianMatrixField::MatrixMap HermitianMatrixField::at(std::size_t point) {
  const auto nn = static_cast<std::size_t>(n() * n());
  return MatrixMap(data_.data() + point * nn, n(), n());
}

HermitianMatrixField::ConstMatrixMap HermitianMatrixField::at(std::size_t point) const {
  const auto nn = static_cast<std::size_t>(n() * n());
  return ConstMatrixMap(data_.data() + point * nn, n(), n());
}

double HermitianMatrixField::hermitian_defect() const {
  double scale = 0.0, defect = 0.0;
  for (std::size_t p = 0; p < size(); ++p) {
    const auto g = at(p);
    scale = std::max(scale, g.cwiseAbs().maxCoeff());
    defect = std::max(defect, (g - g.adjoint()).cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? defect / scale : defect;
}

HermitianMatrixField::Matrix HermitianMatrixField::mean() const {
  Matrix m = Matrix::Zero(n(), n());
  for (std::size_t p = 0; p < size(); ++p) m += at(p);
  return m / static_cast<double>(size());
}

HermitianMatrixField& HermitianMatrixField::operator+=(const HermitianMatrixField& other) {
  if (other.data_.size() != data_.size())
    throw std::invalid_argument("matrix field: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

HermitianMatrixField& HermitianMatrixField::operator*=(double c) {
  for (auto& z : data_) z *= c;
  return *this;
}

}  // namespace kflow
