// smoothop/models.hpp
//
// Deterministic, seeded model operators for tests and experiments.
//
// Randomness contract: a std::mt19937_64 seeded directly with the model's
// seed field; uniform doubles are formed from the top 53 bits of each 64-bit draw
// (u >> 11) * 2^-53, so a fixed seed reproduces the same matrix bit for bit
// on any conforming platform. smooth_random draws its upper triangle in
// row-major order, one real draw per diagonal entry (uniform in [-1,1]) and
// two draws per off-diagonal entry (radius^2 and angle of a uniform point of
// the unit disc), then mirrors conjugates, so the result is Hermitian by
// construction with |x_jk| <= j^-p k^-p.

#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/matrix.hpp"

namespace smoothop {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform over the closed unit disc.
  cd unit_disc() {
    const double r = std::sqrt(uniform01());
    const double phi = 2.0 * 3.14159265358979323846 * uniform01();
    return cd{r * std::cos(phi), r * std::sin(phi)};
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

struct GivensRotation {
  std::size_t i = 1, j = 2;  // 1-based plane indices
  double angle = 0.0;
};

struct ModelSpec {
  enum class Kind { DiagPower, DiagExp, UnitProjection, RankOne, SmoothRandom, GivensConjugated };

  Kind kind = Kind::DiagPower;
  std::size_t dim = 1;
  double alpha = 1.0;                     // diag_power
  double beta = 1.0;                      // diag_exp
  std::size_t index = 1;                  // unit_projection
  std::vector<cd> vector_entries;         // rank_one
  double p = 1.0;                         // smooth_random
  std::uint64_t seed = 0;                 // smooth_random
  std::shared_ptr<const ModelSpec> base;  // givens_conjugated
  std::vector<GivensRotation> rotations;  // givens_conjugated

  static ModelSpec diag_power(double alpha, std::size_t dim) {
    ModelSpec s;
    s.kind = Kind::DiagPower;
    s.alpha = alpha;
    s.dim = dim;
    return s;
  }
  static ModelSpec diag_exp(double beta, std::size_t dim) {
    ModelSpec s;
    s.kind = Kind::DiagExp;
    s.beta = beta;
    s.dim = dim;
    return s;
  }
  static ModelSpec unit_projection(std::size_t n, std::size_t dim) {
    ModelSpec s;
    s.kind = Kind::UnitProjection;
    s.index = n;
    s.dim = dim;
    return s;
  }
  static ModelSpec rank_one(std::vector<cd> entries) {
    ModelSpec s;
    s.kind = Kind::RankOne;
    s.dim = entries.size();
    s.vector_entries = std::move(entries);
    return s;
  }
  static ModelSpec smooth_random(double p, std::uint64_t seed, std::size_t dim) {
    ModelSpec s;
    s.kind = Kind::SmoothRandom;
    s.p = p;
    s.seed = seed;
    s.dim = dim;
    return s;
  }
  static ModelSpec givens_conjugated(ModelSpec base_spec,
                                     std::vector<GivensRotation> rotations) {
    ModelSpec s;
    s.kind = Kind::GivensConjugated;
    s.dim = base_spec.dim;
    s.base = std::make_shared<ModelSpec>(std::move(base_spec));
    s.rotations = std::move(rotations);
    return s;
  }
};

namespace model_detail {

// U = G(i_m, j_m, t_m) ... G(i_1, j_1, t_1), applied as U X U^T.
inline std::vector<cd> givens_product(std::size_t dim,
                                      const std::vector<GivensRotation>& rots) {
  std::vector<cd> u(dim * dim, cd{});
  for (std::size_t i = 0; i < dim; ++i) u[i * dim + i] = 1.0;
  for (const auto& rot : rots) {
    if (rot.i == 0 || rot.j == 0 || rot.i > dim || rot.j > dim || rot.i == rot.j)
      throw std::invalid_argument("givens_conjugated: bad rotation plane");
    const std::size_t a = rot.i - 1, b = rot.j - 1;
    const double c = std::cos(rot.angle), s = std::sin(rot.angle);
    for (std::size_t col = 0; col < dim; ++col) {
      const cd xa = u[a * dim + col], xb = u[b * dim + col];
      u[a * dim + col] = c * xa - s * xb;
      u[b * dim + col] = s * xa + c * xb;
    }
  }
  return u;
}

}  // namespace model_detail

inline GradedMatrix generate(const ModelSpec& spec) {
  if (spec.dim == 0 || spec.dim > limits::max_dim)
    throw std::invalid_argument("generate: dim out of range");
  const std::size_t n = spec.dim;
  switch (spec.kind) {
    case ModelSpec::Kind::DiagPower: {
      if (!(spec.alpha > 0.0)) throw std::invalid_argument("diag_power: alpha must be > 0");
      std::vector<cd> d(n);
      for (std::size_t j = 1; j <= n; ++j)
        d[j - 1] = std::pow(static_cast<double>(j), -spec.alpha);
      return GradedMatrix::diagonal(d);
    }
    case ModelSpec::Kind::DiagExp: {
      if (!(spec.beta > 0.0)) throw std::invalid_argument("diag_exp: beta must be > 0");
      std::vector<cd> d(n);
      for (std::size_t j = 1; j <= n; ++j)
        d[j - 1] = std::exp(-spec.beta * static_cast<double>(j));
      return GradedMatrix::diagonal(d);
    }
    case ModelSpec::Kind::UnitProjection:
      return GradedMatrix::unit_projection(n, spec.index);
    case ModelSpec::Kind::RankOne: {
      // Orthogonal projection onto the span of the given vector.
      double nrm2 = 0.0;
      for (const cd& z : spec.vector_entries) nrm2 += std::norm(z);
      if (nrm2 == 0.0) throw std::invalid_argument("rank_one: zero vector");
      std::vector<cd> a(n * n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          a[j * n + k] = spec.vector_entries[j] * std::conj(spec.vector_entries[k]) / nrm2;
      return GradedMatrix(n, std::move(a));
    }
    case ModelSpec::Kind::SmoothRandom: {
      if (!(spec.p > 0.0)) throw std::invalid_argument("smooth_random: p must be > 0");
      SeededRng rng(spec.seed);
      std::vector<cd> a(n * n, cd{});
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
          const double bound = std::pow(static_cast<double>(j + 1), -spec.p) *
                               std::pow(static_cast<double>(k + 1), -spec.p);
          if (k == j) {
            a[j * n + j] = bound * rng.uniform(-1.0, 1.0);
          } else {
            const cd z = bound * rng.unit_disc();
            a[j * n + k] = z;
            a[k * n + j] = std::conj(z);
          }
        }
      }
      return GradedMatrix(n, std::move(a));
    }
    case ModelSpec::Kind::GivensConjugated: {
      if (!spec.base) throw std::invalid_argument("givens_conjugated: missing base spec");
      const GradedMatrix base = generate(*spec.base);
      if (base.dim() != n)
        throw std::invalid_argument("givens_conjugated: base dim mismatch");
      const auto u = model_detail::givens_product(n, spec.rotations);
      // U base U^T (U is real orthogonal, so U^T = U^*).
      std::vector<cd> tmp(n * n, cd{});
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          const cd uik = u[i * n + k];
          if (uik == cd{}) continue;
          for (std::size_t j = 0; j < n; ++j) tmp[i * n + j] += uik * base.at(k, j);
        }
      std::vector<cd> out(n * n, cd{});
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          cd s{};
          for (std::size_t k = 0; k < n; ++k) s += tmp[i * n + k] * u[j * n + k];
          out[i * n + j] = s;
        }
      return GradedMatrix(n, std::move(out));
    }
  }
  throw std::invalid_argument("generate: unknown model kind");
}

}  // namespace smoothop
