// Cohomology-level arithmetic for constant classes on the torus.
//
// Intersection numbers of constant (1,1)-classes are mixed discriminants of
// their coefficient matrices, normalized so that D(A, ..., A) = det A. The
// class path is omega_t = L + e^{-t} (omega_0 - L), written in s = e^{-t}.
#pragma once

#include <limits>
#include <vector>

#include "kflow/hermitian.hpp"

namespace kflow::classes {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();
/// Intersection numbers below this (relative to det omega_0) count as zero.
inline constexpr double kVanishingThreshold = 1e-12;

CohomologyClass class_path(const CohomologyClass& l, const CohomologyClass& omega0, double t);

/// Positive definiteness.
bool kahler_check(const CohomologyClass& a);

/// Positive semidefiniteness with a 1e-12 relative floor: the closure of the
/// Kähler cone.
bool nef_check(const CohomologyClass& a);

/// Supremum of times for which the class path stays Kähler; kInfiniteTime
/// when it never leaves the cone. Throws std::invalid_argument if omega_0 is
/// not Kähler or the dimensions differ.
double singularity_time(const CohomologyClass& l, const CohomologyClass& omega0);

/// Mixed discriminant of exactly n arguments. Symmetric (bit-for-bit) under
/// argument permutation, multilinear, and D(A, ..., A) = det A exactly.
double mixed_discriminant(const std::vector<CohomologyClass>& args);

/// Coefficients c_0..c_n of det(L + s M), M = omega_0 - L.
struct VolumePolynomial {
  std::vector<double> coefficients;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double operator()(double s) const;
  /// Class volume [omega_t]^n.
  double at_time(double t) const;
  /// Lowest index whose coefficient exceeds `threshold`.
  int lowest_nonzero(double threshold) const;
};

VolumePolynomial volume_polynomial(const CohomologyClass& l, const CohomologyClass& omega0);

/// Smallest k with D(L^(n-k), omega_0^(k)) > 1e-12 det omega_0. Throws
/// std::invalid_argument unless L is nef and omega_0 Kähler.
int collapse_order(const CohomologyClass& l, const CohomologyClass& omega0);

/// Binomial coefficient.
double binomial(int n, int k);

}  // namespace kflow::classes
