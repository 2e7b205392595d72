// smoothop/graded.hpp
//
// Truncated rapidly decreasing / slowly increasing sequence spaces.
//
// A GradedVector of length N stands for a sequence whose coordinates beyond N
// vanish, so every weighted norm below is exact on the representation, not an
// approximation. Coordinates are 1-based in all formulas: the grade-q norm is
//
//   |v|_q  = (sum_j |v_j|^2 j^{2q})^{1/2},      j = 1..N,
//
// and the dual norm |v|'_q uses weights j^{-2q}. The duality pairing
// <x,y> = sum_j x_j conj(y_j) is conjugate-linear in its second argument.
//
// Values are immutable after construction and every operation is a pure
// function, so concurrent reads are safe.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/config.hpp"

namespace smoothop {

// j^q for integer q (either sign) by squaring. j is a 1-based coordinate.
inline double weight(std::size_t j, int q) {
  if (j == 0) throw std::invalid_argument("weight: coordinate index is 1-based");
  if (q < -limits::max_grade || q > limits::max_grade)
    throw std::invalid_argument("weight: grade " + std::to_string(q) +
                                " outside configured range");
  double base = static_cast<double>(j);
  unsigned e = static_cast<unsigned>(q < 0 ? -q : q);
  double r = 1.0;
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return q < 0 ? 1.0 / r : r;
}

class GradedVector {
 public:
  explicit GradedVector(std::vector<cd> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("GradedVector: dim must be >= 1");
    if (entries_.size() > limits::max_dim)
      throw std::invalid_argument("GradedVector: dim exceeds configured maximum");
    for (const cd& z : entries_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("GradedVector: non-finite entry");
  }

  static GradedVector zero(std::size_t dim) { return GradedVector(std::vector<cd>(dim, cd{})); }

  // n-th unit vector e_n, n 1-based.
  static GradedVector unit(std::size_t dim, std::size_t n) {
    if (n == 0 || n > dim) throw std::invalid_argument("GradedVector::unit: index out of range");
    std::vector<cd> e(dim, cd{});
    e[n - 1] = 1.0;
    return GradedVector(std::move(e));
  }

  std::size_t dim() const { return entries_.size(); }
  const std::vector<cd>& entries() const { return entries_; }
  cd coord(std::size_t j) const { return entries_.at(j - 1); }  // 1-based

 private:
  std::vector<cd> entries_;
};

// Diagonal of weights j^q, grade may be negative (dual weights).
class WeightDiagonal {
 public:
  WeightDiagonal(std::size_t dim, int q) : dim_(dim), q_(q) {
    if (dim == 0 || dim > limits::max_dim)
      throw std::invalid_argument("WeightDiagonal: dim out of range");
    values_.reserve(dim);
    for (std::size_t j = 1; j <= dim; ++j) values_.push_back(weight(j, q));
  }

  std::size_t dim() const { return dim_; }
  int grade() const { return q_; }
  double value(std::size_t j) const { return values_.at(j - 1); }  // 1-based
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t dim_;
  int q_;
  std::vector<double> values_;
};

namespace detail {
inline double weighted_l2(const GradedVector& v, int signed_grade) {
  double s = 0.0;
  for (std::size_t j = 1; j <= v.dim(); ++j) {
    const cd z = v.coord(j);
    const double w = weight(j, signed_grade);
    s += (z.real() * z.real() + z.imag() * z.imag()) * w * w;
  }
  if (!std::isfinite(s))
    throw std::range_error("graded norm: weighted sum exceeded double range");
  return std::sqrt(s);
}
}  // namespace detail

inline double norm_q(const GradedVector& v, int q) {
  if (q < 0) throw std::invalid_argument("norm_q: grade must be nonnegative");
  return detail::weighted_l2(v, q);
}

inline double dual_norm_q(const GradedVector& v, int q) {
  if (q < 0) throw std::invalid_argument("dual_norm_q: grade must be nonnegative");
  return detail::weighted_l2(v, -q);
}

inline cd pairing(const GradedVector& x, const GradedVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("pairing: dimension mismatch");
  cd s{};
  for (std::size_t j = 1; j <= x.dim(); ++j) s += x.coord(j) * std::conj(y.coord(j));
  return s;
}

}  // namespace smoothop
