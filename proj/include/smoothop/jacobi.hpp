// smoothop/jacobi.hpp
//
// Dense complex kernels on raw row-major buffers: a cyclic Jacobi
// eigensolver for Hermitian matrices and a one-sided Jacobi SVD used for
// numerically reliable nullspaces. Both annihilate a complex pivot by first
// rotating its phase away and then applying the classical real 2x2 rotation,
// so every update is unitary.
//
// Accuracy notes. The two-sided sweep stops when every off-diagonal
// magnitude drops below jacobi_off_tol times the (unitarily invariant)
// Frobenius norm of the input. The one-sided variant orthogonalizes columns
// directly, which keeps tiny singular values accurate to roughly
// eps * sigma_max instead of the sqrt(eps) floor a Gram matrix would give;
// nullspace extraction depends on that.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "smoothop/config.hpp"

namespace smoothop::dense {

struct EigenResult {
  std::size_t n = 0;
  std::vector<double> values;   // ascending
  std::vector<cd> vectors;      // row-major n*n; column j pairs with values[j]
};

namespace detail {

inline double frobenius(std::size_t n, const std::vector<cd>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) s += std::norm(a[i]);
  return std::sqrt(s);
}

// 2x2 rotation parameters for the Hermitian block [[app, apq], [conj(apq), aqq]]:
// with phase w = apq/|apq| the block reduces to a real symmetric one, and the
// classical smaller-angle rotation annihilates the pivot.
struct Rotation {
  double c;  // cosine
  double s;  // sine
  cd w;      // pivot phase
  double t;  // tangent, for the diagonal update
};

inline Rotation make_rotation(double app, double aqq, cd apq) {
  const double r = std::abs(apq);
  Rotation rot{1.0, 0.0, cd{1.0, 0.0}, 0.0};
  if (r == 0.0) return rot;
  rot.w = apq / r;
  const double tau = (aqq - app) / (2.0 * r);
  double t;
  if (tau >= 0.0)
    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
  else
    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  rot.t = t;
  rot.c = 1.0 / std::sqrt(1.0 + t * t);
  rot.s = t * rot.c;
  return rot;
}

}  // namespace detail

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps. The input
// is symmetrized once up front so callers may pass data that is Hermitian
// only to rounding. Throws on failure to converge (does not happen for
// Hermitian input at these sizes).
inline EigenResult jacobi_hermitian(std::size_t n, std::vector<cd> a,
                                    bool want_vectors = true) {
  if (n == 0 || a.size() != n * n)
    throw std::invalid_argument("jacobi_hermitian: bad buffer size");

  for (std::size_t p = 0; p < n; ++p) {
    a[p * n + p] = cd{a[p * n + p].real(), 0.0};
    for (std::size_t q = p + 1; q < n; ++q) {
      const cd m = 0.5 * (a[p * n + q] + std::conj(a[q * n + p]));
      a[p * n + q] = m;
      a[q * n + p] = std::conj(m);
    }
  }

  EigenResult out;
  out.n = n;
  std::vector<cd> v;
  if (want_vectors) {
    v.assign(n * n, cd{});
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  const double frob = detail::frobenius(n, a);
  if (frob == 0.0) {
    out.values.assign(n, 0.0);
    out.vectors = std::move(v);
    return out;
  }
  const double thresh = defaults::jacobi_off_tol * frob;

  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cd apq = a[p * n + q];
        if (std::abs(apq) <= thresh) continue;
        rotated = true;

        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        const auto rot = detail::make_rotation(app, aqq, apq);
        const double c = rot.c, s = rot.s;
        const cd w = rot.w, wb = std::conj(rot.w);
        const double r = std::abs(apq);

        // Rows p,q of V^* A, then columns p,q of (.)V; V acts as
        // [[c, s], [-conj(w) s, conj(w) c]] on the (p,q) plane.
        for (std::size_t i = 0; i < n; ++i) {
          const cd xp = a[p * n + i], xq = a[q * n + i];
          a[p * n + i] = c * xp - s * w * xq;
          a[q * n + i] = s * xp + c * w * xq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cd xp = a[i * n + p], xq = a[i * n + q];
          a[i * n + p] = c * xp - s * wb * xq;
          a[i * n + q] = s * xp + c * wb * xq;
        }
        a[p * n + p] = cd{app - rot.t * r, 0.0};
        a[q * n + q] = cd{aqq + rot.t * r, 0.0};
        a[p * n + q] = cd{};
        a[q * n + p] = cd{};

        if (want_vectors) {
          for (std::size_t i = 0; i < n; ++i) {
            const cd xp = v[i * n + p], xq = v[i * n + q];
            v[i * n + p] = c * xp - s * wb * xq;
            v[i * n + q] = s * xp + c * wb * xq;
          }
        }
      }
    }
    if (!rotated) break;
    if (sweep == max_sweeps - 1)
      throw std::runtime_error("jacobi_hermitian: no convergence");
  }

  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i].real();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = out.values[order[i]];
  out.values = std::move(sorted);
  if (want_vectors) {
    out.vectors.assign(n * n, cd{});
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + order[j]];
  } else {
    out.vectors.clear();
  }
  return out;
}

struct SingularResult {
  std::size_t cols = 0;
  std::vector<double> sigma;    // ascending
  std::vector<cd> right;        // row-major cols*cols; column j pairs with sigma[j]
};

// One-sided Jacobi on a rows*cols matrix (rows >= 1): orthogonalizes columns
// by right rotations, accumulating the unitary V. sigma are the column norms
// at convergence; exact-kernel directions come out at the rounding level.
inline SingularResult one_sided_jacobi_svd(std::size_t rows, std::size_t cols,
                                           std::vector<cd> u) {
  if (rows == 0 || cols == 0 || u.size() != rows * cols)
    throw std::invalid_argument("one_sided_jacobi_svd: bad buffer size");

  std::vector<cd> v(cols * cols, cd{});
  for (std::size_t i = 0; i < cols; ++i) v[i * cols + i] = 1.0;

  constexpr int max_sweeps = 60;
  constexpr double orth_tol = 1e-15;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double gpp = 0.0, gqq = 0.0;
        cd gpq{};
        for (std::size_t r = 0; r < rows; ++r) {
          const cd up = u[r * cols + p], uq = u[r * cols + q];
          gpp += std::norm(up);
          gqq += std::norm(uq);
          gpq += std::conj(up) * uq;
        }
        if (gpp == 0.0 || gqq == 0.0) continue;
        if (std::abs(gpq) <= orth_tol * std::sqrt(gpp * gqq)) continue;
        rotated = true;

        const auto rot = detail::make_rotation(gpp, gqq, gpq);
        const double c = rot.c, s = rot.s;
        const cd wb = std::conj(rot.w);
        for (std::size_t r = 0; r < rows; ++r) {
          const cd up = u[r * cols + p], uq = u[r * cols + q];
          u[r * cols + p] = c * up - s * wb * uq;
          u[r * cols + q] = s * up + c * wb * uq;
        }
        for (std::size_t r = 0; r < cols; ++r) {
          const cd vp = v[r * cols + p], vq = v[r * cols + q];
          v[r * cols + p] = c * vp - s * wb * vq;
          v[r * cols + q] = s * vp + c * wb * vq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == max_sweeps - 1)
      throw std::runtime_error("one_sided_jacobi_svd: no convergence");
  }

  SingularResult out;
  out.cols = cols;
  out.sigma.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += std::norm(u[r * cols + j]);
    out.sigma[j] = std::sqrt(s);
  }

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return out.sigma[i] < out.sigma[j]; });
  std::vector<double> sorted(cols);
  for (std::size_t j = 0; j < cols; ++j) sorted[j] = out.sigma[order[j]];
  out.right.assign(cols * cols, cd{});
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < cols; ++i) out.right[i * cols + j] = v[i * cols + order[j]];
  out.sigma = std::move(sorted);
  return out;
}

// Largest singular value via the Gram matrix a^* a (no vectors).
inline double largest_singular_gram(std::size_t n, const std::vector<cd>& a) {
  if (n == 0 || a.size() != n * n)
    throw std::invalid_argument("largest_singular_gram: bad buffer size");
  std::vector<cd> gram(n * n, cd{});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      cd s{};
      for (std::size_t r = 0; r < n; ++r) s += std::conj(a[r * n + j]) * a[r * n + k];
      gram[j * n + k] = s;
      gram[k * n + j] = std::conj(s);
    }
  const auto eig = jacobi_hermitian(n, std::move(gram), /*want_vectors=*/false);
  const double top = eig.values.back();
  return std::sqrt(top > 0.0 ? top : 0.0);
}

// Smallest singular value of a square matrix via the Hermitian augmentation
// [[0, A], [A^*, 0]], whose eigenvalues are +/- the singular values. Unlike
// the Gram route this resolves sigma_min down to eps * sigma_max.
inline double smallest_singular_augmented(std::size_t n, const std::vector<cd>& a) {
  if (n == 0 || a.size() != n * n)
    throw std::invalid_argument("smallest_singular_augmented: bad buffer size");
  const std::size_t m = 2 * n;
  std::vector<cd> aug(m * m, cd{});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      aug[j * m + (n + k)] = a[j * n + k];
      aug[(n + k) * m + j] = std::conj(a[j * n + k]);
    }
  const auto eig = jacobi_hermitian(m, std::move(aug), /*want_vectors=*/false);
  double smallest = std::abs(eig.values.front());
  for (double lam : eig.values) smallest = std::min(smallest, std::abs(lam));
  return smallest;
}

}  // namespace smoothop::dense
