// Shared test oracles and fixture builders. Everything here is deliberately
// written the dumb way (direct summation, triple loops, closed forms) so the
// checks stay independent of the library's computational paths.

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "smoothop/matrix.hpp"
#include "smoothop/models.hpp"

namespace oracles {

using smoothop::cd;
using smoothop::GradedMatrix;
using smoothop::GradedVector;

// (sum_j |v_j|^2 j^{2q})^{1/2} via std::pow, term by term.
inline double direct_norm(const GradedVector& v, int q) {
  double s = 0.0;
  for (std::size_t j = 1; j <= v.dim(); ++j)
    s += std::norm(v.coord(j)) * std::pow(static_cast<double>(j), 2.0 * q);
  return std::sqrt(s);
}

inline double direct_dual_norm(const GradedVector& v, int q) {
  double s = 0.0;
  for (std::size_t j = 1; j <= v.dim(); ++j)
    s += std::norm(v.coord(j)) * std::pow(static_cast<double>(j), -2.0 * q);
  return std::sqrt(s);
}

// Triple-loop product.
inline GradedMatrix naive_multiply(const GradedMatrix& x, const GradedMatrix& y) {
  const std::size_t n = x.dim();
  std::vector<cd> c(n * n, cd{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cd s{};
      for (std::size_t k = 0; k < n; ++k) s += x.at(i, k) * y.at(k, j);
      c[i * n + j] = s;
    }
  return GradedMatrix(n, std::move(c));
}

// For diagonal matrices: ||diag(d)||_q = max_j |d_j| j^{2q}.
inline double diag_op_norm(const std::vector<cd>& d, int q) {
  double m = 0.0;
  for (std::size_t j = 1; j <= d.size(); ++j)
    m = std::max(m, std::abs(d[j - 1]) * std::pow(static_cast<double>(j), 2.0 * q));
  return m;
}

// Entrywise |||.|||_q by direct scan.
inline double direct_matrix_norm(const GradedMatrix& x, int q) {
  double m = 0.0;
  for (std::size_t j = 1; j <= x.dim(); ++j)
    for (std::size_t k = 1; k <= x.dim(); ++k)
      m = std::max(m, std::abs(x.at(j - 1, k - 1)) *
                          std::pow(static_cast<double>(j), q) *
                          std::pow(static_cast<double>(k), q));
  return m;
}

// Random complex matrix with |x_jk| <= (jk)^-decay, not symmetrized.
inline GradedMatrix random_matrix(smoothop::SeededRng& rng, std::size_t n, double decay) {
  std::vector<cd> a(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      a[j * n + k] = rng.unit_disc() *
                     std::pow(static_cast<double>((j + 1) * (k + 1)), -decay);
  return GradedMatrix(n, std::move(a));
}

// Random product of plane rotations touching every adjacent pair once plus a
// few extra random planes.
inline std::vector<smoothop::GivensRotation> random_rotations(smoothop::SeededRng& rng,
                                                              std::size_t n,
                                                              std::size_t extra = 4) {
  std::vector<smoothop::GivensRotation> rots;
  for (std::size_t i = 1; i < n; ++i)
    rots.push_back({i, i + 1, rng.uniform(-1.5, 1.5)});
  for (std::size_t e = 0; e < extra; ++e) {
    const std::size_t i = 1 + rng.raw() % n;
    std::size_t j = 1 + rng.raw() % n;
    while (j == i) j = 1 + rng.raw() % n;
    rots.push_back({i, j, rng.uniform(-1.5, 1.5)});
  }
  return rots;
}

// Unitary (real orthogonal) conjugation matrix from rotations, exposed for
// tests that need U itself.
inline GradedMatrix rotation_matrix(std::size_t n,
                                    const std::vector<smoothop::GivensRotation>& rots) {
  std::vector<cd> u(n * n, cd{});
  for (std::size_t i = 0; i < n; ++i) u[i * n + i] = 1.0;
  for (const auto& rot : rots) {
    const std::size_t a = rot.i - 1, b = rot.j - 1;
    const double c = std::cos(rot.angle), s = std::sin(rot.angle);
    for (std::size_t col = 0; col < n; ++col) {
      const cd xa = u[a * n + col], xb = u[b * n + col];
      u[a * n + col] = c * xa - s * xb;
      u[b * n + col] = s * xa + c * xb;
    }
  }
  return GradedMatrix(n, std::move(u));
}

// Givens-conjugated diagonal: a normal matrix with a known spectrum.
inline GradedMatrix conjugated_diag(smoothop::SeededRng& rng, const std::vector<cd>& diag) {
  const std::size_t n = diag.size();
  const GradedMatrix u = rotation_matrix(n, random_rotations(rng, n));
  return smoothop::multiply(smoothop::multiply(u, GradedMatrix::diagonal(diag)),
                            smoothop::involution(u));
}

}  // namespace oracles
