// smoothop/config.hpp
//
// Global range guards and default tolerances. Grades are capped so that the
// largest weight dim^(2*max_grade) stays inside double range for the default
// dimension cap; the guards throw instead of letting weights saturate.

#pragma once

#include <complex>
#include <cstddef>

namespace smoothop {

using cd = std::complex<double>;

struct limits {
  static constexpr int max_grade = 16;
  static constexpr std::size_t max_dim = 4096;
};

struct defaults {
  // Relative thresholds; all are scaled by the 0-grade operator norm of the
  // element they apply to.
  static constexpr double normal_tol = 1e-8;
  static constexpr double cluster_tol = 1e-8;
  static constexpr double zero_tol = 1e-10;
  static constexpr double invertibility_tol = 1e-10;
  static constexpr double commutant_sigma_tol = 1e-10;
  static constexpr double distinct_coeff_tol = 1e-6;
  // Modulus window inside which eigenvalue ordering falls back to the
  // argument/real-part tie-break.
  static constexpr double order_tie_tol = 1e-12;
  // Jacobi sweep stop: all off-diagonal magnitudes below this times the
  // Frobenius norm of the input.
  static constexpr double jacobi_off_tol = 1e-14;
};

}  // namespace smoothop
