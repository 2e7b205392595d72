// smoothop/subalgebra.hpp
//
// Commutative *-subalgebra machinery on the truncation.
//
// minimal_basis builds the minimal projection family of the *-algebra
// generated by commuting normal inputs: spectral projections of every
// generator are collected and then refined by products PQ and differences
// P - PQ until pairwise orthogonal. Every candidate is snapped back to an
// exact Hermitian idempotent (eigenvalues rounded to {0,1}) after each step,
// which stops tolerance drift across iterations. Members of the result are
// atoms: every spectral projection of every generator is a sum of them.
//
// Completeness is judged within the truncation (ranks sum to dim). An
// incomplete family extends to a complete one by appending rank-one
// projections spanning the orthogonal complement; at finite truncation this
// always succeeds, so the infinite-dimensional distinction between
// completeness against l_2 and against the smooth subspace has no analogue
// here and is not modeled.
//
// The commutant of a generator set is the nullspace of the stacked maps
// X -> X G_i - G_i X inside dim x dim matrices, thresholded at 1e-10
// (relative) on singular values; the one-sided SVD keeps exact-kernel
// directions well under that threshold. For a minimal family, maximal
// commutativity is the rank-one-and-complete criterion, cross-checked
// against the commutant dimension (the A = A' criterion at finite scale).
//
// All operations are pure; the refinement keeps only local state, so
// independent inputs may be processed concurrently.
//
// Characters evaluate as normalized traces tr(P_n y) / rank(P_n), which is
// exact on orthogonal families and costs O(dim^2) per value.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/spectral.hpp"

namespace smoothop {

struct ProjectionFamily {
  std::size_t dim = 0;
  std::vector<GradedMatrix> projections;
  bool minimal = false;
  bool complete = false;

  std::size_t count() const { return projections.size(); }

  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r;
    for (const auto& p : projections)
      r.push_back(static_cast<std::size_t>(std::llround(trace(p).real())));
    return r;
  }
};

namespace subalg_detail {

// Round a near-projection to an exact Hermitian idempotent. Eigenvalues must
// already sit within 0.3 of {0, 1}; anything in between means the input was
// not a projection of a commuting family and the refinement must stop.
inline GradedMatrix snap_projection(const GradedMatrix& p) {
  const std::size_t n = p.dim();
  auto eig = dense::jacobi_hermitian(n, p.entries());
  std::vector<cd> out(n * n, cd{});
  std::size_t rank = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lam = eig.values[j];
    if (lam < -0.3 || lam > 1.3 || (lam > 0.3 && lam < 0.7))
      throw std::runtime_error("minimal_basis: refinement produced a non-projection");
    if (lam >= 0.7) {
      ++rank;
      for (std::size_t r = 0; r < n; ++r) {
        const cd vr = eig.vectors[r * n + j];
        for (std::size_t s = 0; s < n; ++s)
          out[r * n + s] += vr * std::conj(eig.vectors[s * n + j]);
      }
    }
  }
  if (rank == 0) return GradedMatrix::zero(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = r; s < n; ++s) {
      const cd m = 0.5 * (out[r * n + s] + std::conj(out[s * n + r]));
      out[r * n + s] = m;
      out[s * n + r] = std::conj(m);
    }
  return GradedMatrix(n, std::move(out));
}

inline bool same_projection(const GradedMatrix& a, const GradedMatrix& b) {
  return (a - b).op_norm(0) <= 1e-8;
}

// Deterministic family order: ascending rank, then lexicographic on the real
// diagonal (larger diagonal entry first at the first index where they differ
// by more than 1e-9).
inline void sort_family(std::vector<GradedMatrix>& f) {
  std::stable_sort(f.begin(), f.end(), [](const GradedMatrix& a, const GradedMatrix& b) {
    const double ra = trace(a).real(), rb = trace(b).real();
    if (std::abs(ra - rb) > 0.5) return ra < rb;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const double da = a.at(i, i).real(), db = b.at(i, i).real();
      if (std::abs(da - db) > 1e-9) return da > db;
    }
    return false;
  });
}

}  // namespace subalg_detail

// Minimal projection family of the *-algebra generated by pairwise commuting
// normal matrices.
inline ProjectionFamily minimal_basis(const std::vector<GradedMatrix>& generators) {
  if (generators.empty())
    throw std::invalid_argument("minimal_basis: empty generator list");
  const std::size_t dim = generators.front().dim();
  for (const auto& g : generators)
    if (g.dim() != dim) throw std::invalid_argument("minimal_basis: mixed dimensions");

  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (!is_normal(generators[i]))
      throw std::domain_error("minimal_basis: generator " + std::to_string(i) +
                              " is not normal within tolerance");
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const double ni = generators[i].op_norm(0), nj = generators[j].op_norm(0);
      if (ni == 0.0 || nj == 0.0) continue;
      const double comm =
          (multiply(generators[i], generators[j]) - multiply(generators[j], generators[i]))
              .op_norm(0);
      if (comm > 1e-8 * ni * nj)
        throw std::domain_error("minimal_basis: generators " + std::to_string(i) + " and " +
                                std::to_string(j) + " do not commute within tolerance");
    }
  }

  // Seed: spectral projections of every nonzero generator.
  std::vector<GradedMatrix> seeds;
  for (const auto& g : generators) {
    if (g.op_norm(0) == 0.0) continue;
    const auto d = decompose(g);
    for (const auto& p : d.projections)
      seeds.push_back(subalg_detail::snap_projection(p));
  }

  std::vector<GradedMatrix> family;
  for (const auto& s : seeds) {
    bool dup = false;
    for (const auto& f : family) dup = dup || subalg_detail::same_projection(f, s);
    if (!dup && frobenius_norm(s) > 0.0) family.push_back(s);
  }

  // Refinement to pairwise orthogonality. Each split strictly lowers the
  // total rank count, so the loop terminates well inside the guard.
  const std::size_t guard = 4 * dim * dim + 64;
  std::size_t steps = 0;
  bool changed = true;
  while (changed) {
    if (++steps > guard)
      throw std::runtime_error("minimal_basis: refinement failed to stabilize");
    changed = false;
    for (std::size_t i = 0; i < family.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < family.size() && !changed; ++j) {
        const GradedMatrix prod = multiply(family[i], family[j]);
        if (prod.op_norm(0) <= 1e-9) continue;
        const GradedMatrix r = subalg_detail::snap_projection(prod);
        if (frobenius_norm(r) == 0.0) continue;  // product is numerically null

        std::vector<GradedMatrix> pieces;
        pieces.push_back(r);
        const GradedMatrix pi = family[i] - r;
        const GradedMatrix pj = family[j] - r;
        if (frobenius_norm(pi) > 1e-8)
          pieces.push_back(subalg_detail::snap_projection(pi));
        if (frobenius_norm(pj) > 1e-8)
          pieces.push_back(subalg_detail::snap_projection(pj));

        std::vector<GradedMatrix> next;
        for (std::size_t k = 0; k < family.size(); ++k)
          if (k != i && k != j) next.push_back(family[k]);
        for (const auto& piece : pieces) {
          if (frobenius_norm(piece) == 0.0) continue;
          bool dup = false;
          for (const auto& f : next) dup = dup || subalg_detail::same_projection(f, piece);
          if (!dup) next.push_back(piece);
        }
        family = std::move(next);
        changed = true;
      }
    }
  }

  subalg_detail::sort_family(family);

  // Soundness: every seed projection must be a sum of atoms.
  for (const auto& s : seeds) {
    GradedMatrix sum = GradedMatrix::zero(dim);
    for (const auto& a : family)
      if ((multiply(a, s) - a).op_norm(0) <= 0.5) sum = sum + a;
    if ((sum - s).op_norm(0) > 1e-8)
      throw std::runtime_error(
          "minimal_basis: a generator projection escaped the refined family");
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (multiply(family[i], family[j]).op_norm(0) > 1e-9)
        throw std::runtime_error("minimal_basis: refined family is not orthogonal");

  ProjectionFamily out;
  out.dim = dim;
  out.projections = std::move(family);
  out.minimal = true;
  std::size_t ranks = 0;
  for (std::size_t r : out.ranks()) ranks += r;
  out.complete = ranks == dim;
  return out;
}

// Coefficient functional attached to one minimal projection: maps an algebra
// element y = sum mu_n P_n to mu_n.
struct Character {
  std::size_t index = 0;
  std::size_t rank = 1;
  GradedMatrix projection;

  cd evaluate(const GradedMatrix& y) const {
    return trace(multiply(projection, y)) / static_cast<double>(rank);
  }
};

inline std::vector<Character> characters(const ProjectionFamily& family) {
  if (!family.minimal)
    throw std::domain_error("characters: family must carry the minimal flag");
  std::vector<Character> out;
  const auto ranks = family.ranks();
  for (std::size_t n = 0; n < family.count(); ++n)
    out.push_back({n, ranks[n], family.projections[n]});
  return out;
}

struct RankOneChainRow {
  std::size_t n = 0;  // family index
  int q = 0;
  double e_q = 0.0;    // |e_n|_q
  double p_q = 0.0;    // ||P_n||_q
  double e_2q = 0.0;   // |e_n|_{2q}
};

struct KoetheRepresentation {
  std::vector<int> grades;
  std::vector<std::vector<double>> norm_table;  // [n][grade index]
  std::map<std::pair<int, int>, std::vector<double>> ratio_diagnostics;  // partial sums
  std::vector<RankOneChainRow> chain_rows;      // rank-one norm chain data
  double chain_max_violation = 0.0;             // worst slack in the chain, relative
};

namespace subalg_detail {

// Unit vector spanning a rank-one projection: largest-diagonal column scaled.
inline GradedVector rank_one_vector(const GradedMatrix& p) {
  const std::size_t n = p.dim();
  std::size_t best = 0;
  double best_val = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    if (p.at(k, k).real() > best_val) {
      best_val = p.at(k, k).real();
      best = k;
    }
  if (best_val <= 0.0)
    throw std::runtime_error("rank_one_vector: projection has empty diagonal");
  std::vector<cd> e(n);
  const double invroot = 1.0 / std::sqrt(best_val);
  for (std::size_t r = 0; r < n; ++r) e[r] = p.at(r, best) * invroot;
  return GradedVector(std::move(e));
}

}  // namespace subalg_detail

// Norm table ||P_n||_q and the Grothendieck-Pietsch partial ratio sums
// sum_n ||P_n||_q / ||P_n||_r. For rank-one members the chain
// 1 <= |e_n|_q <= |e_n|_q^2 = ||P_n||_q <= |e_n|_{2q} is evaluated and its
// worst violation recorded (it should sit at rounding level).
inline KoetheRepresentation koethe_representation(
    const ProjectionFamily& family, const std::vector<int>& grades,
    const std::vector<std::pair<int, int>>& ratio_grade_pairs) {
  if (family.count() == 0)
    throw std::invalid_argument("koethe_representation: empty family");
  KoetheRepresentation rep;
  rep.grades = grades;
  const auto ranks = family.ranks();

  for (std::size_t n = 0; n < family.count(); ++n) {
    std::vector<double> row;
    for (int q : grades) row.push_back(family.projections[n].op_norm(q));
    rep.norm_table.push_back(std::move(row));
  }

  for (const auto& [q, r] : ratio_grade_pairs) {
    std::vector<double> partial;
    double acc = 0.0;
    for (std::size_t n = 0; n < family.count(); ++n) {
      acc += family.projections[n].op_norm(q) / family.projections[n].op_norm(r);
      partial.push_back(acc);
    }
    rep.ratio_diagnostics[{q, r}] = std::move(partial);
  }

  for (std::size_t n = 0; n < family.count(); ++n) {
    if (ranks[n] != 1) continue;
    const auto e = subalg_detail::rank_one_vector(family.projections[n]);
    for (std::size_t qi = 0; qi < grades.size(); ++qi) {
      const int q = grades[qi];
      if (2 * q > limits::max_grade) continue;
      RankOneChainRow row;
      row.n = n;
      row.q = q;
      row.e_q = norm_q(e, q);
      row.p_q = rep.norm_table[n][qi];
      row.e_2q = norm_q(e, 2 * q);
      rep.chain_rows.push_back(row);

      auto viol = [&](double lo, double hi) {
        const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
        return std::max(0.0, (lo - hi) / scale);
      };
      double w = viol(1.0, row.e_q);
      w = std::max(w, viol(row.e_q, row.e_q * row.e_q));
      w = std::max(w, std::abs(row.e_q * row.e_q - row.p_q) /
                          std::max(row.p_q, 1.0));
      w = std::max(w, viol(row.p_q, row.e_2q));
      rep.chain_max_violation = std::max(rep.chain_max_violation, w);
    }
  }
  if (rep.chain_max_violation > 1e-10)
    throw std::runtime_error(
        "koethe_representation: rank-one norm chain violated beyond 1e-10");
  return rep;
}

// Single generator of the algebra spanned by a minimal family, by the
// decreasing-coefficient recipe
//
//   C_q = max(1, max_{1<=n<=q} ||P_n||_q),   lambda_1 = 1,
//   lambda_n = min((1/n^2) inf_q C_q / ||P_n||_q, lambda_{n-1}/2),
//
// with the infimum over the supplied grade list. Returns x = sum lambda_n P_n
// and the lambda list; sum_n lambda_n ||P_n||_q <= C_q sum 1/n^2 per grade.
inline std::pair<GradedMatrix, std::vector<double>> single_generator(
    const ProjectionFamily& family, const std::vector<int>& grades) {
  if (family.count() == 0)
    throw std::invalid_argument("single_generator: empty family");
  if (!family.minimal)
    throw std::domain_error("single_generator: family must carry the minimal flag");
  if (grades.empty())
    throw std::invalid_argument("single_generator: empty grade list");

  const std::size_t count = family.count();
  std::map<int, double> cq;
  for (int q : grades) {
    if (q < 0) throw std::invalid_argument("single_generator: grades must be nonnegative");
    double m = 1.0;
    for (std::size_t n = 1; n <= std::min(static_cast<std::size_t>(q), count); ++n)
      m = std::max(m, family.projections[n - 1].op_norm(q));
    cq[q] = m;
  }

  std::vector<double> lambda(count);
  for (std::size_t n = 1; n <= count; ++n) {
    double inf_ratio = std::numeric_limits<double>::infinity();
    for (int q : grades)
      inf_ratio = std::min(inf_ratio, cq[q] / family.projections[n - 1].op_norm(q));
    if (n == 1) {
      lambda[0] = 1.0;
      continue;
    }
    const double dn = static_cast<double>(n);
    lambda[n - 1] = std::min(inf_ratio / (dn * dn), lambda[n - 2] / 2.0);
  }

  GradedMatrix x = GradedMatrix::zero(family.dim);
  for (std::size_t n = 0; n < count; ++n)
    x = x + cd{lambda[n], 0.0} * family.projections[n];

  for (std::size_t n = 1; n < count; ++n)
    if (!(lambda[n] < lambda[n - 1]))
      throw std::runtime_error("single_generator: coefficients failed to decrease");
  constexpr double basel = 1.6449340668482264;  // sum 1/n^2
  for (int q : grades) {
    double s = 0.0;
    for (std::size_t n = 0; n < count; ++n)
      s += lambda[n] * family.projections[n].op_norm(q);
    if (s > cq[q] * basel * (1.0 + 1e-9))
      throw std::runtime_error("single_generator: summability bound violated");
  }
  return {x, lambda};
}

inline std::pair<GradedMatrix, std::vector<double>> single_generator(
    const ProjectionFamily& family) {
  return single_generator(family, {0, 1, 2, 3, 4});
}

// Orthonormal (Frobenius) basis of {X : X G_i = G_i X for all i}.
inline std::vector<GradedMatrix> commutant(const std::vector<GradedMatrix>& generators) {
  if (generators.empty())
    throw std::invalid_argument("commutant: empty generator list");
  const std::size_t dim = generators.front().dim();
  for (const auto& g : generators)
    if (g.dim() != dim) throw std::invalid_argument("commutant: mixed dimensions");

  const std::size_t d2 = dim * dim;
  const std::size_t rows = generators.size() * d2;
  // Column (a,b) holds vec(G E_ab - E_ab G) stacked over generators:
  // (G E_ab)_{rc} = G_{ra} delta_{bc}, (E_ab G)_{rc} = delta_{ra} G_{bc}.
  std::vector<cd> m(rows * d2, cd{});
  for (std::size_t gi = 0; gi < generators.size(); ++gi) {
    const auto& g = generators[gi];
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) {
        const std::size_t col = a * dim + b;
        for (std::size_t r = 0; r < dim; ++r) {
          const std::size_t row_pos = gi * d2 + r * dim + b;
          m[row_pos * d2 + col] += g.at(r, a);
        }
        for (std::size_t c = 0; c < dim; ++c) {
          const std::size_t row_pos = gi * d2 + a * dim + c;
          m[row_pos * d2 + col] -= g.at(b, c);
        }
      }
  }

  const auto svd = dense::one_sided_jacobi_svd(rows, d2, std::move(m));
  const double smax = svd.sigma.back();
  const double thresh = defaults::commutant_sigma_tol * smax;

  std::vector<GradedMatrix> basis;
  for (std::size_t j = 0; j < d2; ++j) {
    if (svd.sigma[j] > thresh) continue;
    std::vector<cd> mat(d2);
    for (std::size_t i = 0; i < d2; ++i) mat[i] = svd.right[i * d2 + j];
    basis.emplace_back(dim, std::move(mat));
  }
  return basis;
}

// Rank-one-and-complete criterion for a minimal family, cross-checked
// against the commutant dimension.
inline bool is_maximal_commutative(const ProjectionFamily& family) {
  if (!family.minimal)
    throw std::domain_error("is_maximal_commutative: family must carry the minimal flag");
  if (family.count() == 0)
    throw std::invalid_argument("is_maximal_commutative: empty family");

  const auto ranks = family.ranks();
  std::size_t total = 0;
  bool all_rank_one = true;
  for (std::size_t r : ranks) {
    total += r;
    all_rank_one = all_rank_one && r == 1;
  }
  const bool primary = all_rank_one && total == family.dim;

  const std::size_t comm_dim = commutant(family.projections).size();
  const bool via_commutant = comm_dim == family.count();
  if (primary != via_commutant)
    throw std::runtime_error(
        "is_maximal_commutative: commutant cross-check disagreed with the rank "
        "criterion");
  return primary;
}

}  // namespace smoothop
