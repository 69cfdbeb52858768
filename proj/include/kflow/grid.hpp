// Periodic grids and fields on the flat complex torus.
//
// The torus has complex dimension n and real coordinates x_1..x_n, y_1..y_n
// with z_j = x_j + i y_j, each of period 2*pi. A grid declares the subset of
// real axes a field may depend on (its reduction profile); derivatives along
// every other axis vanish identically.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace kflow {

/// Real axis index: x_j is axis j - 1, y_j is axis n + j - 1.
using Axis = int;

class PeriodicGrid {
public:
  PeriodicGrid() = default;
  /// Throws std::invalid_argument for n < 1, an odd resolution or one below 4,
  /// and out-of-range or repeated axes. Axes are stored sorted.
  PeriodicGrid(int n, std::vector<Axis> active_axes, int resolution);

  int n() const { return n_; }
  int resolution() const { return resolution_; }
  const std::vector<Axis>& active_axes() const { return active_; }
  int active_count() const { return static_cast<int>(active_.size()); }
  bool is_active(Axis axis) const;
  /// Slot of `axis` inside active_axes(), or -1.
  int slot_of(Axis axis) const;

  std::size_t size() const { return size_; }
  double spacing() const;
  /// Linear-index stride of an active slot; the first slot varies slowest.
  std::size_t stride(int slot) const;
  std::size_t index_along(std::size_t point, int slot) const;
  /// Coordinate of `point` along a real axis (0 on inactive axes).
  double coordinate(std::size_t point, Axis axis) const;
  /// All 2n real coordinates of a point.
  std::vector<double> coordinates(std::size_t point) const;

  std::string axis_name(Axis axis) const;
  /// Parses "x1".."xn", "y1".."yn". Throws std::invalid_argument.
  static Axis parse_axis(std::string_view name, int n);

  bool operator==(const PeriodicGrid&) const = default;

private:
  int n_ = 1;
  std::vector<Axis> active_;
  int resolution_ = 4;
  std::size_t size_ = 1;
};

class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(PeriodicGrid grid, double value = 0.0);
  /// Throws std::invalid_argument on a size mismatch or non-finite entry.
  ScalarField(PeriodicGrid grid, std::vector<double> values);

  /// Samples f at every grid point; f receives all 2n real coordinates.
  static ScalarField sample(const PeriodicGrid& grid,
                            const std::function<double(std::span<const double>)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max() const;
  double min() const;
  double mean() const;
  std::size_t argmin() const;
  bool all_finite() const;
  /// Throws std::invalid_argument naming `what` if any entry is NaN or Inf.
  void require_finite(std::string_view what) const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator+=(double c);
  ScalarField& operator*=(double c);

private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator+(ScalarField a, double c);
ScalarField operator*(double c, ScalarField a);

/// n x n complex matrix per grid point, stored column-major point by point.
class HermitianMatrixField {
public:
  using Matrix = Eigen::MatrixXcd;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;

  HermitianMatrixField() = default;
  explicit HermitianMatrixField(PeriodicGrid grid);
  /// Constant field equal to `value` everywhere.
  HermitianMatrixField(PeriodicGrid grid, const Matrix& value);

  const PeriodicGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  std::size_t size() const { return grid_.size(); }

  MatrixMap at(std::size_t point);
  ConstMatrixMap at(std::size_t point) const;

  /// Largest |g_jk - conj(g_kj)| relative to the largest entry magnitude.
  double hermitian_defect() const;
  /// Grid average of every component.
  Matrix mean() const;

  HermitianMatrixField& operator+=(const HermitianMatrixField& other);
  HermitianMatrixField& operator*=(double c);

private:
  PeriodicGrid grid_;
  std::vector<std::complex<double>> data_;
};

}  // namespace kflow
