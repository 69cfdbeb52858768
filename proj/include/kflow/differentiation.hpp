// Partial derivatives of periodic grid data along a single real axis.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kflow/grid.hpp"

namespace kflow {

enum class Backend {
  spectral,  ///< FFT wavenumber multiplication
  fd4,       ///< 4th-order centered differences
};

std::string to_string(Backend b);
Backend parse_backend(std::string_view name);

/// First (order 1) or pure second (order 2) derivative along `axis`.
/// Derivatives along inactive axes are identically zero.
///
/// Spectral first derivatives drop the Nyquist mode; spectral second
/// derivatives keep it (multiplier -(N/2)^2), which makes both exact on
/// trigonometric polynomials of degree <= N/2 - 1.
std::vector<double> derivative(const PeriodicGrid& grid, std::span<const double> values,
                               Axis axis, int order, Backend backend);

/// Mixed derivative d_a d_b. Equal axes fall through to the pure second derivative.
std::vector<double> mixed_derivative(const PeriodicGrid& grid, std::span<const double> values,
                                     Axis a, Axis b, Backend backend);

}  // namespace kflow
