#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "smoothop/models.hpp"
#include "smoothop/span.hpp"
#include "smoothop/subalgebra.hpp"

using namespace smoothop;
using Catch::Approx;

namespace {

GradedMatrix mask_projection(std::size_t dim, const std::vector<std::size_t>& coords) {
  GradedMatrix p = GradedMatrix::zero(dim);
  for (std::size_t c : coords) p = p + GradedMatrix::unit_projection(dim, c);
  return p;
}

// Brute-force atom oracle for diagonal 0/1 patterns: coordinates are grouped
// by their membership signature across all masks; each nonzero signature
// class is one atom.
std::vector<std::set<std::size_t>> mask_atoms(std::size_t dim,
                                              const std::vector<std::vector<std::size_t>>& masks) {
  std::map<std::vector<bool>, std::set<std::size_t>> classes;
  for (std::size_t c = 1; c <= dim; ++c) {
    std::vector<bool> sig;
    bool any = false;
    for (const auto& m : masks) {
      const bool in = std::find(m.begin(), m.end(), c) != m.end();
      sig.push_back(in);
      any = any || in;
    }
    if (any) classes[sig].insert(c);
  }
  std::vector<std::set<std::size_t>> atoms;
  for (auto& kv : classes) atoms.push_back(kv.second);
  return atoms;
}

std::set<std::size_t> diagonal_support(const GradedMatrix& p) {
  std::set<std::size_t> s;
  for (std::size_t c = 1; c <= p.dim(); ++c)
    if (p.at(c - 1, c - 1).real() > 0.5) s.insert(c);
  return s;
}

}  // namespace

TEST_CASE("minimal_basis refines overlapping masks to atoms", "[subalgebra]") {
  const std::vector<std::vector<std::size_t>> masks{{1, 2}, {2, 3}};
  const auto g1 = mask_projection(3, masks[0]);
  const auto g2 = mask_projection(3, masks[1]);
  const auto fam = minimal_basis({g1, g2});

  const auto expected = mask_atoms(3, masks);
  REQUIRE(fam.count() == expected.size());
  REQUIRE(fam.count() == 3);
  std::vector<std::set<std::size_t>> got;
  for (const auto& p : fam.projections) {
    REQUIRE(op_norm_q(multiply(p, p) - p, 0) <= 1e-12);
    got.push_back(diagonal_support(p));
  }
  for (const auto& atom : expected)
    REQUIRE(std::find(got.begin(), got.end(), atom) != got.end());
  REQUIRE(fam.minimal);
  REQUIRE(fam.complete);  // ranks 1+1+1 = dim 3
}

TEST_CASE("minimal_basis keeps already-minimal inputs", "[subalgebra]") {
  SECTION("single unit projection") {
    const auto fam = minimal_basis({GradedMatrix::unit_projection(3, 1)});
    REQUIRE(fam.count() == 1);
    REQUIRE(frobenius_norm(fam.projections[0] - GradedMatrix::unit_projection(3, 1)) <= 1e-12);
    REQUIRE_FALSE(fam.complete);
  }
  SECTION("rank-2 spectral projection stays one atom") {
    const auto fam = minimal_basis({GradedMatrix::diagonal({cd{2}, cd{2}, cd{1}})});
    REQUIRE(fam.count() == 2);
    const auto ranks = fam.ranks();
    REQUIRE(std::count(ranks.begin(), ranks.end(), 2) == 1);
    REQUIRE(std::count(ranks.begin(), ranks.end(), 1) == 1);
    REQUIRE(fam.complete);
  }
}

TEST_CASE("minimal_basis oracle agreement on random masks", "[subalgebra]") {
  SeededRng rng(81);
  for (int t = 0; t < 10; ++t) {
    const std::size_t dim = 5 + rng.raw() % 3;
    std::vector<std::vector<std::size_t>> masks;
    for (int g = 0; g < 3; ++g) {
      std::vector<std::size_t> mask;
      for (std::size_t c = 1; c <= dim; ++c)
        if (rng.uniform01() < 0.5) mask.push_back(c);
      if (!mask.empty()) masks.push_back(mask);
    }
    if (masks.empty()) continue;
    std::vector<GradedMatrix> gens;
    for (const auto& m : masks) gens.push_back(mask_projection(dim, m));
    const auto fam = minimal_basis(gens);
    const auto expected = mask_atoms(dim, masks);
    REQUIRE(fam.count() == expected.size());
    std::vector<std::set<std::size_t>> got;
    for (const auto& p : fam.projections) got.push_back(diagonal_support(p));
    for (const auto& atom : expected)
      REQUIRE(std::find(got.begin(), got.end(), atom) != got.end());
  }
}

TEST_CASE("minimal_basis under a common rotation", "[subalgebra]") {
  SeededRng rng(92);
  const std::size_t dim = 6;
  const auto u = oracles::rotation_matrix(dim, oracles::random_rotations(rng, dim));
  auto conj = [&](const GradedMatrix& m) { return multiply(multiply(u, m), involution(u)); };

  const auto g1 = conj(GradedMatrix::diagonal({cd{2}, cd{2}, cd{1}, cd{1}, cd{0.5}, cd{0.5}}));
  const auto g2 = conj(GradedMatrix::diagonal({cd{3}, cd{1}, cd{3}, cd{1}, cd{3}, cd{1}}));
  const auto fam = minimal_basis({g1, g2});

  // Signatures: coordinate pairs (g1 value, g2 value) are all distinct except
  // none; atoms should be the six coordinate lines conjugated.
  REQUIRE(fam.count() == 6);
  REQUIRE(fam.complete);

  // Refinement soundness: generators lie in the span of the family.
  const auto basis = frobenius_orthonormalize(fam.projections);
  REQUIRE(span_residual(g1, basis) <= 1e-8 * frobenius_norm(g1));
  REQUIRE(span_residual(g2, basis) <= 1e-8 * frobenius_norm(g2));

  // Basis property: the family is linearly independent.
  REQUIRE(basis.size() == fam.count());
}

TEST_CASE("minimal_basis input validation", "[subalgebra]") {
  SECTION("non-commuting generators") {
    const auto a = GradedMatrix::diagonal({cd{1}, cd{2}});
    GradedMatrix b(2, {cd{0}, cd{1}, cd{1}, cd{0}});
    REQUIRE_THROWS_AS(minimal_basis({a, b}), std::domain_error);
  }
  SECTION("non-normal generator") {
    const GradedMatrix nil(2, {cd{0}, cd{1}, cd{0}, cd{0}});
    REQUIRE_THROWS_AS(minimal_basis({nil}), std::domain_error);
  }
  SECTION("empty list") {
    REQUIRE_THROWS_AS(minimal_basis({}), std::invalid_argument);
  }
}

TEST_CASE("membership criterion through the family span", "[subalgebra]") {
  SeededRng rng(17);
  const std::size_t dim = 5;
  const auto u = oracles::rotation_matrix(dim, oracles::random_rotations(rng, dim));
  auto conj = [&](const GradedMatrix& m) { return multiply(multiply(u, m), involution(u)); };
  const auto g = conj(GradedMatrix::diagonal({cd{2}, cd{2}, cd{1}, cd{0.5}, cd{0.25}}));
  const auto fam = minimal_basis({g});
  const auto basis = frobenius_orthonormalize(fam.projections);

  // x built from the family: every spectral projection lies in the span.
  GradedMatrix x = GradedMatrix::zero(dim);
  const std::vector<double> mus{0.9, 0.4, 0.2, 0.1};
  for (std::size_t n = 0; n < fam.count(); ++n)
    x = x + cd{mus[n % mus.size()], 0.0} * fam.projections[n];
  for (const auto& p : decompose(x).projections)
    REQUIRE(span_residual(p, basis) <= 1e-8 * frobenius_norm(p));

  // An element with a spectral projection outside the span fails the test.
  const auto outside = GradedMatrix::unit_projection(dim, 1);
  bool all_inside = true;
  for (const auto& p : decompose(outside).projections)
    all_inside = all_inside && span_residual(p, basis) <= 1e-8 * frobenius_norm(p);
  REQUIRE_FALSE(all_inside);
}

TEST_CASE("characters read off coefficients", "[subalgebra]") {
  const auto e1 = GradedMatrix::unit_projection(3, 1);
  const auto e2 = GradedMatrix::unit_projection(3, 2);
  ProjectionFamily fam;
  fam.dim = 3;
  fam.projections = {e1, e2};
  fam.minimal = true;

  const auto chars = characters(fam);
  REQUIRE(chars.size() == 2);
  const auto y = cd{2.0} * e1 + cd{3.0} * e2;
  REQUIRE(chars[0].evaluate(y).real() == Approx(2.0));
  REQUIRE(chars[1].evaluate(y).real() == Approx(3.0));

  SECTION("value one on the own projection, zero elsewhere") {
    REQUIRE(chars[0].evaluate(e1).real() == Approx(1.0));
    REQUIRE(std::abs(chars[0].evaluate(e2)) <= 1e-15);
  }
  SECTION("multiplicative on random algebra elements") {
    SeededRng rng(3);
    ProjectionFamily fam2;
    fam2.dim = 3;
    fam2.projections = {e1 + e2, GradedMatrix::unit_projection(3, 3)};
    fam2.minimal = true;
    const auto ch = characters(fam2);
    for (int t = 0; t < 20; ++t) {
      const cd a1 = rng.unit_disc(), a2 = rng.unit_disc();
      const cd b1 = rng.unit_disc(), b2 = rng.unit_disc();
      const auto xx = a1 * fam2.projections[0] + a2 * fam2.projections[1];
      const auto yy = b1 * fam2.projections[0] + b2 * fam2.projections[1];
      for (const auto& c : ch) {
        const cd lhs = c.evaluate(multiply(xx, yy));
        const cd rhs = c.evaluate(xx) * c.evaluate(yy);
        REQUIRE(std::abs(lhs - rhs) <= 1e-8);
      }
    }
  }
  SECTION("non-minimal family rejected") {
    ProjectionFamily raw;
    raw.dim = 3;
    raw.projections = {e1};
    raw.minimal = false;
    REQUIRE_THROWS_AS(characters(raw), std::domain_error);
  }
}

TEST_CASE("koethe_representation norm table and ratios", "[subalgebra]") {
  const std::size_t dim = 6;
  ProjectionFamily fam;
  fam.dim = dim;
  for (std::size_t n = 1; n <= dim; ++n)
    fam.projections.push_back(GradedMatrix::unit_projection(dim, n));
  fam.minimal = true;
  fam.complete = true;

  const std::vector<int> grades{0, 1, 2, 3};
  const auto rep = koethe_representation(fam, grades, {{1, 2}});

  SECTION("table entries are n^2q") {
    for (std::size_t n = 1; n <= dim; ++n)
      for (std::size_t qi = 0; qi < grades.size(); ++qi)
        REQUIRE(rep.norm_table[n - 1][qi] ==
                Approx(std::pow(static_cast<double>(n), 2 * grades[qi])).epsilon(1e-12));
  }
  SECTION("entries never dip under one") {
    for (const auto& row : rep.norm_table)
      for (double v : row) REQUIRE(v >= 1.0 - 1e-12);
  }
  SECTION("ratio partial sums match sum 1/n^2 below pi^2/6") {
    const auto& partial = rep.ratio_diagnostics.at({1, 2});
    double acc = 0.0;
    for (std::size_t n = 1; n <= dim; ++n) {
      acc += 1.0 / (static_cast<double>(n) * n);
      REQUIRE(partial[n - 1] == Approx(acc).epsilon(1e-12));
      REQUIRE(partial[n - 1] < 1.6449340668482264);
    }
  }
  SECTION("rank-one chain rows verified") {
    REQUIRE_FALSE(rep.chain_rows.empty());
    REQUIRE(rep.chain_max_violation <= 1e-10);
    for (const auto& row : rep.chain_rows) {
      REQUIRE(1.0 <= row.e_q * (1.0 + 1e-10));
      REQUIRE(row.e_q <= row.e_q * row.e_q * (1.0 + 1e-10));
      REQUIRE(row.e_q * row.e_q == Approx(row.p_q).epsilon(1e-10));
      REQUIRE(row.p_q <= row.e_2q * (1.0 + 1e-10));
    }
  }
  SECTION("single projection family gives one row") {
    ProjectionFamily single;
    single.dim = dim;
    single.projections = {GradedMatrix::unit_projection(dim, 2)};
    single.minimal = true;
    const auto r1 = koethe_representation(single, grades, {});
    REQUIRE(r1.norm_table.size() == 1);
  }
}

TEST_CASE("koethe chain on rotated rank-one families", "[subalgebra]") {
  SeededRng rng(44);
  const std::size_t dim = 6;
  const auto u = oracles::rotation_matrix(dim, oracles::random_rotations(rng, dim));
  auto conj = [&](const GradedMatrix& m) { return multiply(multiply(u, m), involution(u)); };
  ProjectionFamily fam;
  fam.dim = dim;
  for (std::size_t n = 1; n <= dim; ++n)
    fam.projections.push_back(conj(GradedMatrix::unit_projection(dim, n)));
  fam.minimal = true;
  const auto rep = koethe_representation(fam, {0, 1, 2, 3}, {});
  REQUIRE(rep.chain_max_violation <= 1e-10);
}

TEST_CASE("single_generator follows the recipe", "[subalgebra]") {
  SECTION("base case: one projection") {
    ProjectionFamily fam;
    fam.dim = 3;
    fam.projections = {GradedMatrix::unit_projection(3, 1)};
    fam.minimal = true;
    const auto [x, lambda] = single_generator(fam, {0, 1, 2});
    REQUIRE(lambda.size() == 1);
    REQUIRE(lambda[0] == 1.0);
    REQUIRE(frobenius_norm(x - GradedMatrix::unit_projection(3, 1)) <= 1e-14);
  }
  SECTION("hand evaluation for {E_1, E_2} with grades {0,1,2}") {
    ProjectionFamily fam;
    fam.dim = 2;
    fam.projections = {GradedMatrix::unit_projection(2, 1),
                       GradedMatrix::unit_projection(2, 2)};
    fam.minimal = true;
    const auto [x, lambda] = single_generator(fam, {0, 1, 2});
    // C_0 = 1, C_1 = max(1, ||E_1||_1) = 1, C_2 = max(1, ||E_1||_2, ||E_2||_2) = 16.
    // inf_q C_q/||E_2||_q = min(1/1, 1/4, 16/16) = 1/4; lambda_2 = min(1/16, 1/2).
    REQUIRE(lambda.size() == 2);
    REQUIRE(lambda[0] == 1.0);
    REQUIRE(lambda[1] == Approx(1.0 / 16.0).epsilon(1e-14));
    REQUIRE(x.at(0, 0).real() == Approx(1.0));
    REQUIRE(x.at(1, 1).real() == Approx(1.0 / 16.0));
  }
  SECTION("round trip through decompose") {
    SeededRng rng(71);
    const std::size_t dim = 6;
    const auto u = oracles::rotation_matrix(dim, oracles::random_rotations(rng, dim));
    auto conj = [&](const GradedMatrix& m) { return multiply(multiply(u, m), involution(u)); };
    ProjectionFamily fam;
    fam.dim = dim;
    fam.projections = {conj(mask_projection(dim, {1, 2})), conj(mask_projection(dim, {3})),
                       conj(mask_projection(dim, {4, 5}))};
    fam.minimal = true;
    const auto [x, lambda] = single_generator(fam);
    for (std::size_t n = 1; n < lambda.size(); ++n) REQUIRE(lambda[n] < lambda[n - 1]);
    const auto d = decompose(x);
    REQUIRE(d.count() == fam.count());
    for (std::size_t n = 0; n < d.count(); ++n) {
      REQUIRE(d.eigenvalues[n].real() == Approx(lambda[n]).epsilon(1e-10));
      REQUIRE(op_norm_q(d.projections[n] - fam.projections[n], 0) <= 1e-8);
      REQUIRE(d.multiplicities[n] == fam.ranks()[n]);
    }
  }
  SECTION("empty family rejected") {
    ProjectionFamily fam;
    fam.dim = 2;
    fam.minimal = true;
    REQUIRE_THROWS_AS(single_generator(fam), std::invalid_argument);
  }
}

TEST_CASE("commutant dimensions", "[subalgebra]") {
  SECTION("identity commutes with everything") {
    const auto basis = commutant({GradedMatrix::identity(3)});
    REQUIRE(basis.size() == 9);
  }
  SECTION("distinct diagonal pins down the diagonal algebra") {
    const auto basis = commutant({GradedMatrix::diagonal({cd{1}, cd{2}})});
    REQUIRE(basis.size() == 2);
    for (const auto& b : basis) {
      REQUIRE(std::abs(b.at(0, 1)) <= 1e-10);
      REQUIRE(std::abs(b.at(1, 0)) <= 1e-10);
    }
  }
  SECTION("unit projections pin down diagonals at dim 3") {
    const auto basis = commutant({GradedMatrix::unit_projection(3, 1),
                                  GradedMatrix::unit_projection(3, 2),
                                  GradedMatrix::unit_projection(3, 3)});
    REQUIRE(basis.size() == 3);
  }
  SECTION("commutant basis is orthonormal and star-closed") {
    SeededRng rng(10);
    const auto g = oracles::conjugated_diag(rng, {cd{1}, cd{1}, cd{2}, cd{3}});
    const auto basis = commutant({g});
    // dim formula: ranks (2,1,1) -> 4 + 1 + 1 = 6
    REQUIRE(basis.size() == 6);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      REQUIRE(frobenius_norm(basis[i]) == Approx(1.0).epsilon(1e-10));
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        REQUIRE(std::abs(frobenius_inner(basis[i], basis[j])) <= 1e-10);
      // star-closure: the adjoint stays inside the span
      REQUIRE(span_residual(involution(basis[i]), basis) <= 1e-8);
      // members commute with the generator
      REQUIRE(op_norm_q(multiply(basis[i], g) - multiply(g, basis[i]), 0) <= 1e-9);
    }
    // the generator's own algebra sits inside the commutant
    REQUIRE(span_residual(g, basis) <= 1e-8 * frobenius_norm(g));
    REQUIRE(span_residual(multiply(g, g), basis) <=
            1e-8 * frobenius_norm(multiply(g, g)));
  }
}

TEST_CASE("maximal commutativity", "[subalgebra]") {
  auto make_family = [](std::size_t dim, std::vector<GradedMatrix> ps) {
    ProjectionFamily fam;
    fam.dim = dim;
    fam.projections = std::move(ps);
    fam.minimal = true;
    std::size_t total = 0;
    for (std::size_t r : fam.ranks()) total += r;
    fam.complete = total == dim;
    return fam;
  };

  SECTION("complete rank-one family is maximal") {
    std::vector<GradedMatrix> ps;
    for (std::size_t n = 1; n <= 4; ++n) ps.push_back(GradedMatrix::unit_projection(4, n));
    REQUIRE(is_maximal_commutative(make_family(4, ps)));
  }
  SECTION("rank-2 member breaks maximality") {
    const auto fam = make_family(
        3, {mask_projection(3, {1, 2}), GradedMatrix::unit_projection(3, 3)});
    REQUIRE_FALSE(is_maximal_commutative(fam));
  }
  SECTION("incomplete family is not maximal; commutant dimension oracle is 3") {
    const auto fam = make_family(3, {GradedMatrix::unit_projection(3, 1),
                                     GradedMatrix::unit_projection(3, 2)});
    REQUIRE_FALSE(is_maximal_commutative(fam));
    // Sigma r_n^2 + (dim - R)^2 = 1 + 1 + 1 = 3 != 2 projections.
    REQUIRE(commutant(fam.projections).size() == 3);
  }
  SECTION("rotated complete rank-one family stays maximal") {
    SeededRng rng(6);
    const std::size_t dim = 4;
    const auto u = oracles::rotation_matrix(dim, oracles::random_rotations(rng, dim));
    std::vector<GradedMatrix> ps;
    for (std::size_t n = 1; n <= dim; ++n)
      ps.push_back(multiply(multiply(u, GradedMatrix::unit_projection(dim, n)), involution(u)));
    REQUIRE(is_maximal_commutative(make_family(dim, ps)));
  }
}
