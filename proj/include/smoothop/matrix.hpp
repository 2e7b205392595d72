// smoothop/matrix.hpp
//
// The truncated algebra of smooth operators: complex dim x dim matrices with
// the graded operator norms
//
//   ||x||_q   = sup_{ |v|'_q <= 1 } |x v|_q  =  sigma_max(D_q X D_q),
//   |||x|||_q = sup_{j,k} |x_jk| j^q k^q,
//
// where D_q is the weight diagonal of grade q. The first equality follows by
// substituting v = D_q u against a unit u, so the operator norm reduces to a
// largest singular value of the weighted conjugation; it is computed from the
// Gram matrix by the Jacobi solver.
//
// GradedMatrix values are immutable apart from a per-grade, write-once norm
// cache, which fills lazily under a mutex (idempotent writes of identical
// values), so shared matrices can be read concurrently.

#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/graded.hpp"
#include "smoothop/jacobi.hpp"

namespace smoothop {

class GradedMatrix {
 public:
  GradedMatrix(std::size_t dim, std::vector<cd> entries)
      : dim_(dim), a_(std::move(entries)) {
    if (dim_ == 0 || dim_ > limits::max_dim)
      throw std::invalid_argument("GradedMatrix: dim out of range");
    if (a_.size() != dim_ * dim_)
      throw std::invalid_argument("GradedMatrix: entry buffer has wrong size");
    for (const cd& z : a_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("GradedMatrix: non-finite entry");
  }

  static GradedMatrix zero(std::size_t dim) {
    return GradedMatrix(dim, std::vector<cd>(dim * dim, cd{}));
  }

  static GradedMatrix identity(std::size_t dim) {
    std::vector<cd> a(dim * dim, cd{});
    for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] = 1.0;
    return GradedMatrix(dim, std::move(a));
  }

  // E_n: single 1 at coordinate (n, n), n 1-based.
  static GradedMatrix unit_projection(std::size_t dim, std::size_t n) {
    if (n == 0 || n > dim)
      throw std::invalid_argument("GradedMatrix::unit_projection: index out of range");
    std::vector<cd> a(dim * dim, cd{});
    a[(n - 1) * dim + (n - 1)] = 1.0;
    return GradedMatrix(dim, std::move(a));
  }

  static GradedMatrix diagonal(const std::vector<cd>& d) {
    std::vector<cd> a(d.size() * d.size(), cd{});
    for (std::size_t i = 0; i < d.size(); ++i) a[i * d.size() + i] = d[i];
    return GradedMatrix(d.size(), std::move(a));
  }

  GradedMatrix(const GradedMatrix& other) : dim_(other.dim_), a_(other.a_) {
    std::lock_guard<std::mutex> lk(other.cache_mu_);
    norm_cache_ = other.norm_cache_;
  }
  GradedMatrix& operator=(const GradedMatrix& other) {
    if (this != &other) {
      std::map<int, double> cache_copy;
      {
        std::lock_guard<std::mutex> lk(other.cache_mu_);
        cache_copy = other.norm_cache_;
      }
      dim_ = other.dim_;
      a_ = other.a_;
      std::lock_guard<std::mutex> lk(cache_mu_);
      norm_cache_ = std::move(cache_copy);
    }
    return *this;
  }
  GradedMatrix(GradedMatrix&& other) noexcept
      : dim_(other.dim_), a_(std::move(other.a_)) {
    std::lock_guard<std::mutex> lk(other.cache_mu_);
    norm_cache_ = std::move(other.norm_cache_);
  }
  GradedMatrix& operator=(GradedMatrix&& other) noexcept {
    if (this != &other) {
      std::map<int, double> cache_moved;
      {
        std::lock_guard<std::mutex> lk(other.cache_mu_);
        cache_moved = std::move(other.norm_cache_);
      }
      dim_ = other.dim_;
      a_ = std::move(other.a_);
      std::lock_guard<std::mutex> lk(cache_mu_);
      norm_cache_ = std::move(cache_moved);
    }
    return *this;
  }

  std::size_t dim() const { return dim_; }
  const std::vector<cd>& entries() const { return a_; }
  cd at(std::size_t j, std::size_t k) const { return a_[j * dim_ + k]; }  // 0-based

  // ||x||_q with the per-grade cache.
  double op_norm(int q) const {
    {
      std::lock_guard<std::mutex> lk(cache_mu_);
      auto it = norm_cache_.find(q);
      if (it != norm_cache_.end()) return it->second;
    }
    const double value = op_norm_uncached(q);
    std::lock_guard<std::mutex> lk(cache_mu_);
    norm_cache_.emplace(q, value);  // write-once; concurrent fills agree
    return norm_cache_.at(q);
  }

  // Recomputation path, kept separate so cache agreement stays testable.
  double op_norm_uncached(int q) const {
    if (q < 0 || q > limits::max_grade)
      throw std::invalid_argument("op_norm_q: grade out of configured range");
    const WeightDiagonal d(dim_, q);
    std::vector<cd> weighted(dim_ * dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      const double wj = d.value(j + 1);
      for (std::size_t k = 0; k < dim_; ++k) {
        const cd z = a_[j * dim_ + k] * (wj * d.value(k + 1));
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
          throw std::range_error("op_norm_q: weighted entry exceeded double range");
        weighted[j * dim_ + k] = z;
      }
    }
    return dense::largest_singular_gram(dim_, weighted);
  }

  // |||x|||_q, the entrywise weighted supremum.
  double matrix_norm(int q) const {
    if (q < 0 || q > limits::max_grade)
      throw std::invalid_argument("matrix_norm_q: grade out of configured range");
    const WeightDiagonal d(dim_, q);
    double sup = 0.0;
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k) {
        const double v = std::abs(a_[j * dim_ + k]) * d.value(j + 1) * d.value(k + 1);
        if (!std::isfinite(v))
          throw std::range_error("matrix_norm_q: weighted entry exceeded double range");
        if (v > sup) sup = v;
      }
    return sup;
  }

 private:
  std::size_t dim_;
  std::vector<cd> a_;
  mutable std::map<int, double> norm_cache_;
  mutable std::mutex cache_mu_;
};

inline double op_norm_q(const GradedMatrix& x, int q) { return x.op_norm(q); }
inline double matrix_norm_q(const GradedMatrix& x, int q) { return x.matrix_norm(q); }

inline GradedMatrix multiply(const GradedMatrix& x, const GradedMatrix& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("multiply: dimension mismatch");
  const std::size_t n = x.dim();
  std::vector<cd> c(n * n, cd{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cd xik = x.at(i, k);
      if (xik == cd{}) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += xik * y.at(k, j);
    }
  return GradedMatrix(n, std::move(c));
}

// Conjugate transpose.
inline GradedMatrix involution(const GradedMatrix& x) {
  const std::size_t n = x.dim();
  std::vector<cd> c(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) c[j * n + k] = std::conj(x.at(k, j));
  return GradedMatrix(n, std::move(c));
}

inline GradedMatrix add(const GradedMatrix& x, const GradedMatrix& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("add: dimension mismatch");
  std::vector<cd> c(x.entries());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += y.entries()[i];
  return GradedMatrix(x.dim(), std::move(c));
}

inline GradedMatrix subtract(const GradedMatrix& x, const GradedMatrix& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("subtract: dimension mismatch");
  std::vector<cd> c(x.entries());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= y.entries()[i];
  return GradedMatrix(x.dim(), std::move(c));
}

inline GradedMatrix scale(cd alpha, const GradedMatrix& x) {
  std::vector<cd> c(x.entries());
  for (cd& z : c) z *= alpha;
  return GradedMatrix(x.dim(), std::move(c));
}

inline GradedMatrix operator*(const GradedMatrix& x, const GradedMatrix& y) { return multiply(x, y); }
inline GradedMatrix operator+(const GradedMatrix& x, const GradedMatrix& y) { return add(x, y); }
inline GradedMatrix operator-(const GradedMatrix& x, const GradedMatrix& y) { return subtract(x, y); }
inline GradedMatrix operator*(cd alpha, const GradedMatrix& x) { return scale(alpha, x); }

inline cd trace(const GradedMatrix& x) {
  cd t{};
  for (std::size_t i = 0; i < x.dim(); ++i) t += x.at(i, i);
  return t;
}

// tr(y^* x), linear in x.
inline cd frobenius_inner(const GradedMatrix& x, const GradedMatrix& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("frobenius_inner: dimension mismatch");
  cd s{};
  const auto& xa = x.entries();
  const auto& ya = y.entries();
  for (std::size_t i = 0; i < xa.size(); ++i) s += xa[i] * std::conj(ya[i]);
  return s;
}

inline double frobenius_norm(const GradedMatrix& x) {
  double s = 0.0;
  for (const cd& z : x.entries()) s += std::norm(z);
  return std::sqrt(s);
}

// Matrix applied to a vector (plain l_2 action of the truncation).
inline GradedVector apply_matrix(const GradedMatrix& x, const GradedVector& v) {
  if (x.dim() != v.dim()) throw std::invalid_argument("apply_matrix: dimension mismatch");
  const std::size_t n = x.dim();
  std::vector<cd> out(n, cd{});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) out[j] += x.at(j, k) * v.entries()[k];
  return GradedVector(std::move(out));
}

// x + lambda * 1 with the identity kept symbolic; only materialize() forms it.
//
// Invertibility at the truncation is a strict threshold on the smallest
// singular value. That the invertible elements form an open set has no finite
// test content beyond the continuity of that singular value in the entries,
// so it is noted here rather than exposed as an operation.
struct UnitizedElement {
  GradedMatrix base;
  cd scalar;

  GradedMatrix materialize() const {
    std::vector<cd> a(base.entries());
    for (std::size_t i = 0; i < base.dim(); ++i) a[i * base.dim() + i] += scalar;
    return GradedMatrix(base.dim(), std::move(a));
  }
};

// Scale-relative default: defaults::invertibility_tol times the 0-grade norm
// of the materialized element.
inline double default_invertibility_tol(const UnitizedElement& u) {
  return defaults::invertibility_tol * u.materialize().op_norm(0);
}

// Invertibility at finite truncation is l_2 invertibility: smallest singular
// value of base + scalar * I above tol.
inline bool is_invertible_unitized(const UnitizedElement& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_invertible_unitized: tol must be > 0");
  const GradedMatrix m = u.materialize();
  return dense::smallest_singular_augmented(m.dim(), m.entries()) > tol;
}

}  // namespace smoothop
