// smoothop/calculus.hpp
//
// Functional calculus for normal truncations through their spectral
// representation:
//
//   f(x) = sum_n f(lambda_n) P_n,       f(0) = 0.
//
// Functions are a closed enumeration (power / polynomial / table) rather
// than callbacks, so they serialize into CLI inputs and the f(0) = 0
// constraint is structural. The power kind t^theta needs a spectrum on the
// nonnegative axis; tiny negative real parts (above -1e-10 relative) are
// clamped to zero before exponentiation, since Hermitian eigenvalues of PSD
// matrices can undershoot. fractional_power splits theta into its integer
// part (repeated multiplication) times the fractional power of the spectrum.
//
// Everything here is a pure function; concurrent use is safe.
//
// Holder control near zero: estimate_holder fits log|f| against log t on a
// log-spaced grid by least squares, clamps the exponent into (0, 1], and then
// inflates the constant to the largest observed ratio so that the returned
// pair dominates every sample outright.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/spectral.hpp"

namespace smoothop {

class SpectralFunction {
 public:
  enum class Kind { Power, Polynomial, Table };

  static SpectralFunction power(double theta) {
    if (!(theta > 0.0))
      throw std::invalid_argument("SpectralFunction::power: theta must be > 0");
    SpectralFunction f;
    f.kind_ = Kind::Power;
    f.theta_ = theta;
    f.description_ = "power:" + std::to_string(theta);
    return f;
  }

  // Ascending-degree coefficients including the constant term, which must be
  // zero so that f(0) = 0 holds structurally.
  static SpectralFunction polynomial(std::vector<cd> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial: empty coefficient list");
    if (coeffs.front() != cd{})
      throw std::invalid_argument("polynomial: constant term must be zero");
    SpectralFunction f;
    f.kind_ = Kind::Polynomial;
    f.coeffs_ = std::move(coeffs);
    f.description_ = "polynomial(" + std::to_string(f.coeffs_.size() - 1) + ")";
    return f;
  }

  static SpectralFunction table(std::vector<std::pair<cd, cd>> pairs) {
    for (const auto& [lam, val] : pairs)
      if (lam == cd{} && val != cd{})
        throw std::invalid_argument("table: a pair at lambda = 0 must map to 0");
    SpectralFunction f;
    f.kind_ = Kind::Table;
    f.pairs_ = std::move(pairs);
    f.description_ = "table(" + std::to_string(f.pairs_.size()) + ")";
    return f;
  }

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  const std::vector<cd>& coeffs() const { return coeffs_; }
  const std::vector<std::pair<cd, cd>>& pairs() const { return pairs_; }
  const std::string& description() const { return description_; }

  // Evaluate at a point of the spectrum. scale feeds the relative matching
  // tolerances (pass the largest eigenvalue modulus).
  cd eval(cd t, double scale) const {
    switch (kind_) {
      case Kind::Power: {
        const double tol = 1e-10 * std::max(scale, 1e-300);
        if (std::abs(t.imag()) > tol || t.real() < -tol)
          throw std::domain_error("power function: spectrum point off [0, inf)");
        const double re = std::max(t.real(), 0.0);
        return cd{std::pow(re, theta_), 0.0};
      }
      case Kind::Polynomial: {
        cd acc{};
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * t + coeffs_[i];
        return acc;
      }
      case Kind::Table: {
        for (const auto& [lam, val] : pairs_) {
          const double tol = 1e-10 * std::max({std::abs(lam), std::abs(t), 1e-300});
          if (std::abs(lam - t) <= tol) return val;
        }
        throw std::domain_error("table function: spectrum point missing from table");
      }
    }
    throw std::logic_error("SpectralFunction: unknown kind");
  }

  // Pointwise complex conjugate f -> conj(f). For the polynomial kind this is
  // the coefficientwise conjugate, which agrees with conj(f(t)) on real
  // spectra only; power functions are real-valued on their domain.
  SpectralFunction conjugate() const {
    SpectralFunction f = *this;
    switch (kind_) {
      case Kind::Power:
        break;
      case Kind::Polynomial:
        for (cd& c : f.coeffs_) c = std::conj(c);
        break;
      case Kind::Table:
        for (auto& [lam, val] : f.pairs_) val = std::conj(val);
        break;
    }
    return f;
  }

 private:
  Kind kind_ = Kind::Power;
  double theta_ = 1.0;
  std::vector<cd> coeffs_;
  std::vector<std::pair<cd, cd>> pairs_;
  std::string description_;
};

// Pointwise combinations of table-kind functions on a shared point set.
inline SpectralFunction table_product(const SpectralFunction& f, const SpectralFunction& g) {
  if (f.kind() != SpectralFunction::Kind::Table || g.kind() != SpectralFunction::Kind::Table)
    throw std::invalid_argument("table_product: both arguments must be table kind");
  std::vector<std::pair<cd, cd>> out;
  for (const auto& [lam, val] : f.pairs()) out.emplace_back(lam, val * g.eval(lam, std::abs(lam)));
  return SpectralFunction::table(std::move(out));
}

inline SpectralFunction table_sum(const SpectralFunction& f, const SpectralFunction& g) {
  if (f.kind() != SpectralFunction::Kind::Table || g.kind() != SpectralFunction::Kind::Table)
    throw std::invalid_argument("table_sum: both arguments must be table kind");
  std::vector<std::pair<cd, cd>> out;
  for (const auto& [lam, val] : f.pairs()) out.emplace_back(lam, val + g.eval(lam, std::abs(lam)));
  return SpectralFunction::table(std::move(out));
}

// f applied through the spectral representation: sum f(lambda_n) P_n.
inline GradedMatrix apply(const SpectralFunction& f, const SpectralDecomposition& d) {
  double scale = 0.0;
  for (cd lam : d.eigenvalues) scale = std::max(scale, std::abs(lam));
  GradedMatrix out = GradedMatrix::zero(d.dim);
  for (std::size_t n = 0; n < d.count(); ++n)
    out = out + f.eval(d.eigenvalues[n], scale) * d.projections[n];
  return out;
}

struct HolderEstimate {
  double theta = 1.0;       // in (0, 1]
  double constant = 1.0;    // > 0, dominates every sample
  std::vector<std::pair<double, double>> sample_points;  // (t, |f(t)|)
  double residual = 0.0;    // rms of the log-log fit residuals

  bool dominates(double t, double value, double slack = 1e-9) const {
    return value <= constant * std::pow(t, theta) * (1.0 + slack);
  }
};

// Fit |f(t)| ~ C t^theta on a log-spaced grid over (0, radius] (six decades).
// Table-kind functions are sampled at their own points with 0 < |lambda| <=
// radius instead, since they carry no values elsewhere.
inline HolderEstimate estimate_holder(const SpectralFunction& f, double radius,
                                      std::size_t n_samples) {
  if (!(radius > 0.0)) throw std::invalid_argument("estimate_holder: radius must be > 0");
  if (n_samples < 8) throw std::invalid_argument("estimate_holder: n_samples must be >= 8");

  std::vector<std::pair<double, double>> samples;
  if (f.kind() == SpectralFunction::Kind::Table) {
    for (const auto& [lam, val] : f.pairs()) {
      const double t = std::abs(lam);
      if (t > 0.0 && t <= radius) samples.emplace_back(t, std::abs(val));
    }
    if (samples.size() < 2)
      throw std::invalid_argument("estimate_holder: table has too few usable points");
  } else {
    constexpr double decades = 6.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double frac =
          static_cast<double>(n_samples - 1 - i) / static_cast<double>(n_samples - 1);
      const double t = radius * std::pow(10.0, -decades * frac);
      samples.emplace_back(t, std::abs(f.eval(cd{t, 0.0}, radius)));
    }
  }

  // OLS on the nonzero samples in log-log coordinates.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& [t, v] : samples) {
    if (v <= 0.0) continue;
    const double lx = std::log(t), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m == 0)
    throw std::runtime_error("estimate_holder: function vanishes on the whole grid");

  double slope = 1.0, intercept = 0.0;
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (m >= 2 && std::abs(denom) > 0.0) {
    slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / static_cast<double>(m);
  }

  HolderEstimate h;
  h.theta = std::clamp(slope, 1e-6, 1.0);
  h.sample_points = samples;

  double rss = 0.0;
  double cmax = 0.0;
  for (const auto& [t, v] : samples) {
    if (v > 0.0) {
      const double r = std::log(v) - (intercept + slope * std::log(t));
      rss += r * r;
    }
    cmax = std::max(cmax, v / std::pow(t, h.theta));
  }
  h.residual = std::sqrt(rss / static_cast<double>(m));
  h.constant = cmax > 0.0 ? cmax : std::exp(intercept);
  return h;
}

// Both sides of the membership estimate at grade q:
//   lhs = sum |f(lambda_n)| ||P_n||_q,   rhs = C sum |lambda_n|^theta ||P_n||_q.
// Requires h to dominate f on the spectrum of d.
inline std::pair<double, double> membership_bound(const SpectralFunction& f,
                                                  const SpectralDecomposition& d,
                                                  const HolderEstimate& h, int q) {
  double scale = 0.0;
  for (cd lam : d.eigenvalues) scale = std::max(scale, std::abs(lam));
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t n = 0; n < d.count(); ++n) {
    const double alam = std::abs(d.eigenvalues[n]);
    const double fval = std::abs(f.eval(d.eigenvalues[n], scale));
    if (!h.dominates(alam, fval))
      throw std::domain_error("membership_bound: estimate does not dominate f on the spectrum");
    const double pq = d.projections[n].op_norm(q);
    lhs += fval * pq;
    rhs += h.constant * std::pow(alam, h.theta) * pq;
  }
  if (lhs > rhs * (1.0 + 1e-9))
    throw std::runtime_error("membership_bound: lhs exceeded rhs beyond tolerance");
  return {lhs, rhs};
}

// x^theta for normal x with spectrum in [0, inf): the integer part by
// repeated multiplication, the fractional remainder through the calculus.
inline GradedMatrix fractional_power(const GradedMatrix& x, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("fractional_power: theta must be > 0");
  if (!is_normal(x))
    throw std::domain_error("fractional_power: input is not normal within tolerance");
  const SpectralDecomposition d = decompose(x);
  const double nrm0 = x.op_norm(0);
  for (cd lam : d.eigenvalues) {
    if (std::abs(lam.imag()) > 1e-10 * nrm0 || lam.real() < -1e-10 * nrm0)
      throw std::domain_error("fractional_power: spectrum significantly off [0, inf)");
  }

  const double mfloor = std::floor(theta);
  const auto m = static_cast<std::size_t>(mfloor);
  const double frac = theta - mfloor;

  GradedMatrix result = GradedMatrix::identity(x.dim());
  bool have = false;
  if (m >= 1) {
    result = x;
    for (std::size_t i = 1; i < m; ++i) result = multiply(result, x);
    have = true;
  }
  if (frac > 0.0) {
    const GradedMatrix part = apply(SpectralFunction::power(frac), d);
    result = have ? multiply(result, part) : part;
  }
  return result;
}

}  // namespace smoothop
