// smoothop/span.hpp
//
// Frobenius-inner-product span utilities over matrices: modified Gram-Schmidt
// orthonormalization (with one reorthogonalization pass) and least-squares
// residuals of a target against a span.

#pragma once

#include <algorithm>
#include <vector>

#include "smoothop/matrix.hpp"

namespace smoothop {

inline std::vector<GradedMatrix> frobenius_orthonormalize(
    const std::vector<GradedMatrix>& span, double drop_tol_rel = 1e-12) {
  std::vector<GradedMatrix> basis;
  double span_scale = 0.0;
  for (const auto& m : span) span_scale = std::max(span_scale, frobenius_norm(m));
  if (span_scale == 0.0) return basis;
  for (const auto& m : span) {
    GradedMatrix w = m;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w = w - frobenius_inner(w, b) * b;
    const double nw = frobenius_norm(w);
    if (nw <= drop_tol_rel * span_scale) continue;
    basis.push_back(scale(cd{1.0 / nw, 0.0}, w));
  }
  return basis;
}

// || target - proj_span(target) ||_F against an orthonormal basis.
inline double span_residual(const GradedMatrix& target,
                            const std::vector<GradedMatrix>& ortho_basis) {
  GradedMatrix w = target;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : ortho_basis) w = w - frobenius_inner(w, b) * b;
  return frobenius_norm(w);
}

}  // namespace smoothop
