#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "smoothop/models.hpp"
#include "smoothop/spectral.hpp"

using namespace smoothop;
using Catch::Approx;

TEST_CASE("is_normal", "[spectral]") {
  REQUIRE(is_normal(generate(ModelSpec::smooth_random(2.0, 3, 8))));
  const GradedMatrix nil(2, {cd{0}, cd{1}, cd{0}, cd{0}});
  REQUIRE_FALSE(is_normal(nil));
  SECTION("unitary rotation of a diagonal stays normal") {
    SeededRng rng(17);
    const auto x = oracles::conjugated_diag(rng, {cd{1}, cd{2}});
    // commutator oracle
    const auto xs = involution(x);
    const double comm = op_norm_q(multiply(x, xs) - multiply(xs, x), 0);
    REQUIRE(comm <= 1e-12 * op_norm_q(x, 0) * op_norm_q(x, 0));
    REQUIRE(is_normal(x));
  }
}

TEST_CASE("decompose on diagonals", "[spectral]") {
  SECTION("distinct eigenvalues give unit projections") {
    const auto x = GradedMatrix::diagonal({cd{1}, cd{0.5}, cd{0.25}});
    const auto d = decompose(x);
    REQUIRE(d.count() == 3);
    REQUIRE(d.eigenvalues[0].real() == Approx(1.0));
    REQUIRE(d.eigenvalues[1].real() == Approx(0.5));
    REQUIRE(d.eigenvalues[2].real() == Approx(0.25));
    for (std::size_t n = 0; n < 3; ++n) {
      REQUIRE(d.multiplicities[n] == 1);
      REQUIRE(frobenius_norm(d.projections[n] -
                             GradedMatrix::unit_projection(3, n + 1)) <= 1e-12);
    }
  }
  SECTION("repeated eigenvalue merges into one rank-2 projection") {
    const auto x = GradedMatrix::diagonal({cd{2}, cd{2}, cd{1}});
    const auto d = decompose(x);
    REQUIRE(d.count() == 2);
    REQUIRE(d.eigenvalues[0].real() == Approx(2.0));
    REQUIRE(d.multiplicities[0] == 2);
    REQUIRE(d.multiplicities[1] == 1);
    const auto e12 = GradedMatrix::unit_projection(3, 1) + GradedMatrix::unit_projection(3, 2);
    REQUIRE(frobenius_norm(d.projections[0] - e12) <= 1e-12);
  }
  SECTION("zero matrix decomposes to nothing") {
    const auto d = decompose(GradedMatrix::zero(4));
    REQUIRE(d.count() == 0);
    REQUIRE(frobenius_norm(reconstruct(d)) == 0.0);
  }
}

TEST_CASE("decompose against the explicit 2x2 eigenvector oracle", "[spectral]") {
  // x = U diag(3,1) U^T with U the plane rotation by pi/6.
  const double th = 3.14159265358979323846 / 6.0;
  const double c = std::cos(th), s = std::sin(th);
  const GradedMatrix u(2, {cd{c}, cd{-s}, cd{s}, cd{c}});
  const auto x = multiply(multiply(u, GradedMatrix::diagonal({cd{3}, cd{1}})), involution(u));
  const auto d = decompose(x);
  REQUIRE(d.count() == 2);
  REQUIRE(d.eigenvalues[0].real() == Approx(3.0).epsilon(1e-12));
  REQUIRE(d.eigenvalues[1].real() == Approx(1.0).epsilon(1e-12));
  // rank-one oracle v v^* with v = (c, s)
  const GradedMatrix p1(2, {cd{c * c}, cd{c * s}, cd{s * c}, cd{s * s}});
  REQUIRE(frobenius_norm(d.projections[0] - p1) <= 1e-12);
}

TEST_CASE("decompose validations", "[spectral]") {
  SECTION("non-normal rejected") {
    const GradedMatrix nil(2, {cd{0}, cd{1}, cd{0}, cd{0}});
    REQUIRE_THROWS_AS(decompose(nil), std::domain_error);
  }
  SECTION("bad tolerances rejected") {
    REQUIRE_THROWS_AS(decompose(GradedMatrix::zero(2), 0.0, 1e-10), std::invalid_argument);
  }
  SECTION("cluster ambiguity: a long merge chain is an error") {
    std::vector<cd> diag;
    for (int i = 0; i < 16; ++i) diag.push_back(cd{1.0 + 0.9e-8 * i});
    const auto x = GradedMatrix::diagonal(diag);
    REQUIRE_THROWS_AS(decompose(x), std::runtime_error);
  }
}

TEST_CASE("decompose/reconstruct round trip with graded norms", "[spectral]") {
  SeededRng rng(101);
  for (int t = 0; t < 12; ++t) {
    std::vector<cd> diag(16);
    for (std::size_t j = 1; j <= 16; ++j)
      diag[j - 1] = std::pow(static_cast<double>(j), -3.0) * (1.0 + 0.2 * rng.uniform01());
    if (t % 3 == 0) diag[1] = diag[0];  // exercise repeated eigenvalues
    const auto x = oracles::conjugated_diag(rng, diag);
    const auto d = decompose(x);
    const auto r = reconstruct(d);
    for (int q = 0; q <= 4; ++q) {
      const double err = op_norm_q(x - r, q);
      REQUIRE(err <= 1e-8 * op_norm_q(x, q));
    }

    // Projections: hermitian, idempotent, orthogonal, commute with x.
    const double n0 = op_norm_q(x, 0);
    for (std::size_t i = 0; i < d.count(); ++i) {
      const auto& p = d.projections[i];
      REQUIRE(op_norm_q(p - involution(p), 0) <= 1e-9);
      REQUIRE(op_norm_q(multiply(p, p) - p, 0) <= 1e-9);
      REQUIRE(op_norm_q(multiply(p, x) - multiply(x, p), 0) <= 1e-8 * n0);
      for (std::size_t j = i + 1; j < d.count(); ++j)
        REQUIRE(op_norm_q(multiply(p, d.projections[j]), 0) <= 1e-9);
    }
  }
}

TEST_CASE("decompose is permutation-consistent (uniqueness)", "[spectral]") {
  SeededRng rng(55);
  std::vector<cd> diag{cd{1.0}, cd{0.55}, cd{0.3}, cd{0.18}, cd{0.1}};
  const auto x = oracles::conjugated_diag(rng, diag);

  // Conjugate by a permutation matrix (reversal).
  const std::size_t n = x.dim();
  std::vector<cd> perm(n * n, cd{});
  for (std::size_t i = 0; i < n; ++i) perm[i * n + (n - 1 - i)] = 1.0;
  const GradedMatrix pm(n, std::move(perm));
  const auto y = multiply(multiply(pm, x), involution(pm));

  const auto dx = decompose(x);
  const auto dy = decompose(y);
  REQUIRE(dx.count() == dy.count());
  for (std::size_t i = 0; i < dx.count(); ++i) {
    REQUIRE(std::abs(dx.eigenvalues[i] - dy.eigenvalues[i]) <= 1e-10);
    REQUIRE(dx.multiplicities[i] == dy.multiplicities[i]);
    const auto conj_proj = multiply(multiply(pm, dx.projections[i]), involution(pm));
    REQUIRE(op_norm_q(conj_proj - dy.projections[i], 0) <= 1e-8);
  }
}

TEST_CASE("extraction iterates track the closed form", "[spectral]") {
  SECTION("diag(1, 1/2): error_0[k] = 4^-k exactly equals the bound") {
    const auto x = GradedMatrix::diagonal({cd{1}, cd{0.5}});
    const auto tr = extract_leading_projection(x, 6, {0, 1});
    for (std::size_t k = 1; k <= 6; ++k) {
      const double expected = std::pow(4.0, -static_cast<double>(k));
      REQUIRE(tr.error_q.at(0)[k - 1] == Approx(expected).epsilon(1e-10));
      REQUIRE(tr.bound_q.at(0)[k - 1] == Approx(expected).epsilon(1e-12));
      REQUIRE(tr.error_q.at(0)[k - 1] <= tr.bound_q.at(0)[k - 1] * (1.0 + 1e-6));
      // y_k = diag(1, 4^-k)
      const auto& yk = tr.iterates[k - 1];
      REQUIRE(std::abs(yk.at(0, 0) - cd{1.0}) <= 1e-12);
      REQUIRE(std::abs(yk.at(1, 1) - cd{expected}) <= 1e-12);
    }
  }
  SECTION("fixed point: E_1") {
    const auto e1 = GradedMatrix::unit_projection(3, 1);
    const auto tr = extract_leading_projection(e1, 4, {0});
    for (double err : tr.error_q.at(0)) REQUIRE(err <= 1e-12);
  }
  SECTION("repeated leading eigenvalue: diag(2,2,1)") {
    const auto x = GradedMatrix::diagonal({cd{2}, cd{2}, cd{1}});
    const auto tr = extract_leading_projection(x, 5, {0});
    for (std::size_t k = 1; k <= 5; ++k) {
      const double expected = std::pow(4.0, -static_cast<double>(k));
      REQUIRE(tr.error_q.at(0)[k - 1] == Approx(expected).epsilon(1e-10));
    }
  }
  SECTION("error sequences are non-increasing past the first iterate") {
    SeededRng rng(77);
    const auto x = oracles::conjugated_diag(
        rng, {cd{1.0}, cd{0.85}, cd{0.5}, cd{0.2}, cd{0.05}});
    const auto tr = extract_leading_projection(x, 12, {0, 1, 2});
    for (int q : {0, 1, 2})
      for (std::size_t k = 1; k < tr.ks.size(); ++k)
        REQUIRE(tr.error_q.at(q)[k] <=
                tr.error_q.at(q)[k - 1] * (1.0 + 1e-9) + 1e-14);
  }
  SECTION("rejects zero input and bad k_max") {
    REQUIRE_THROWS_AS(extract_leading_projection(GradedMatrix::zero(2), 3, {0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        extract_leading_projection(GradedMatrix::identity(2), 0, {0}),
        std::invalid_argument);
  }
}

TEST_CASE("recover_idempotents base cases", "[spectral]") {
  SECTION("two unit projections") {
    const auto a = cd{2.0} * GradedMatrix::unit_projection(3, 1) +
                   cd{3.0} * GradedMatrix::unit_projection(3, 2);
    const auto rec = recover_idempotents(a, {});
    REQUIRE(rec.size() == 2);
    // spectral order: 3 before 2
    REQUIRE(rec[0].first.real() == Approx(3.0));
    REQUIRE(frobenius_norm(rec[0].second - GradedMatrix::unit_projection(3, 2)) <= 1e-10);
    REQUIRE(rec[1].first.real() == Approx(2.0));
    REQUIRE(frobenius_norm(rec[1].second - GradedMatrix::unit_projection(3, 1)) <= 1e-10);
  }
  SECTION("single projection: N=1") {
    SeededRng rng(3);
    const auto p = oracles::conjugated_diag(rng, {cd{1}, cd{1}, cd{0}});
    const auto a = scale(cd{5.0}, p);
    const auto rec = recover_idempotents(a, {});
    REQUIRE(rec.size() == 1);
    REQUIRE(rec[0].first.real() == Approx(5.0));
    REQUIRE(op_norm_q(rec[0].second - p, 0) <= 1e-9);
  }
}

TEST_CASE("recover_idempotents exercises the collision branch", "[spectral]") {
  // With coefficients ordered (3, -2, 1) the derived values collide:
  // 3(3-1) = 6 and (-2)(-2-1) = 6.
  SeededRng rng(29);
  const auto u = oracles::rotation_matrix(4, oracles::random_rotations(rng, 4));
  auto conj = [&](const GradedMatrix& m) { return multiply(multiply(u, m), involution(u)); };
  const auto a1 = conj(GradedMatrix::unit_projection(4, 1));
  const auto a2 = conj(GradedMatrix::unit_projection(4, 2) + GradedMatrix::unit_projection(4, 3));
  const auto a3 = conj(GradedMatrix::unit_projection(4, 4));
  const auto a = cd{3.0} * a1 + cd{-2.0} * a2 + cd{1.0} * a3;

  const auto rec = recover_idempotents(a, {a1, a2, a3});
  REQUIRE(rec.size() == 3);
  // order by decreasing modulus: 3, -2, 1
  REQUIRE(rec[0].first.real() == Approx(3.0).epsilon(1e-10));
  REQUIRE(op_norm_q(rec[0].second - a1, 0) <= 1e-8);
  REQUIRE(rec[1].first.real() == Approx(-2.0).epsilon(1e-10));
  REQUIRE(op_norm_q(rec[1].second - a2, 0) <= 1e-8);
  REQUIRE(rec[2].first.real() == Approx(1.0).epsilon(1e-10));
  REQUIRE(op_norm_q(rec[2].second - a3, 0) <= 1e-8);
}

TEST_CASE("the recovery induction handles collisions in any coefficient order",
          "[spectral]") {
  // Coefficient list (1, 3, 4), last taken as lambda_N: 1(1-4) = 3(3-4) = -3.
  const auto a1 = GradedMatrix::unit_projection(3, 1);
  const auto a2 = GradedMatrix::unit_projection(3, 2);
  const auto a3 = GradedMatrix::unit_projection(3, 3);
  const auto a = cd{1.0} * a1 + cd{3.0} * a2 + cd{4.0} * a3;
  const auto idems =
      spectral_detail::recover_rec(a, {cd{1.0}, cd{3.0}, cd{4.0}});
  REQUIRE(idems.size() == 3);
  REQUIRE(frobenius_norm(idems[0] - a1) <= 1e-10);
  REQUIRE(frobenius_norm(idems[1] - a2) <= 1e-10);
  REQUIRE(frobenius_norm(idems[2] - a3) <= 1e-10);
}

TEST_CASE("recover_idempotents agrees with the eigendecomposition oracle", "[spectral]") {
  SeededRng rng(41);
  for (int t = 0; t < 8; ++t) {
    std::vector<cd> diag{cd{1.0}, cd{1.0}, cd{0.6}, cd{0.35}, cd{0.35}, cd{0.2}};
    const auto x = oracles::conjugated_diag(rng, diag);
    const auto d = decompose(x);
    const auto rec = recover_idempotents(x, {});
    REQUIRE(rec.size() == d.count());
    for (std::size_t i = 0; i < d.count(); ++i) {
      REQUIRE(std::abs(rec[i].first - d.eigenvalues[i]) <= 1e-9);
      REQUIRE(op_norm_q(rec[i].second - d.projections[i], 0) <= 1e-7);
    }
  }
}

TEST_CASE("recover_idempotents error paths", "[spectral]") {
  SECTION("coefficients too close") {
    const auto a = GradedMatrix::diagonal({cd{1.0}, cd{1.0 + 1e-7}});
    REQUIRE_THROWS_AS(recover_idempotents(a, {}), std::domain_error);
  }
  SECTION("non-normal rejected") {
    const GradedMatrix nil(2, {cd{1}, cd{1}, cd{0}, cd{2}});
    REQUIRE_THROWS_AS(recover_idempotents(nil, {}), std::domain_error);
  }
  SECTION("zero rejected") {
    REQUIRE_THROWS_AS(recover_idempotents(GradedMatrix::zero(2), {}),
                      std::invalid_argument);
  }
}
