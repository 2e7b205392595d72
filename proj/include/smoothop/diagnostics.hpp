// smoothop/diagnostics.hpp
//
// Empirical checks of the analytic inequalities behind the graded norm tower.
//
// dn_check renders the dominating-norm property at finite scale: for each
// sample it evaluates (||x||_q, ||x||_0, ||x||_r) and the smallest admissible
// C in ||x||_q <= C ||x||_0^{1-theta} ||x||_r^theta. In the canonical Heinz
// configuration r = 2q, theta = 1/2 the inequality holds with C = 1:
// sigma_max(D_q X D_q) <= sigma_max(X)^{1/2} sigma_max(D_2q X D_2q)^{1/2},
// and the check asserts it. Violations are counted against the C = 1
// reference line in every configuration.
//
// Evaluation is pure; family members may be processed in parallel with a
// deterministic merge order.
//
// "belongs to s" is undecidable from finite data. The documented surrogate
// used by characterize: fitted log-log decay exponents at the largest
// truncation (transient n = 1..2 excluded, ordinary least squares) must be
// <= -1, and the running sup/sum rows must be stable across the two largest
// truncations (< 1% growth). These thresholds are configuration, not claims.
// A family whose total rank stops growing is reported as the finite case and
// passes outright.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/spectral.hpp"

namespace smoothop {

struct DNReport {
  int q = 0;
  int r = 0;
  double theta = 0.5;

  struct Sample {
    double norm_q = 0.0;
    double norm_0 = 0.0;
    double norm_r = 0.0;
    double ratio = 0.0;  // norm_q / (norm_0^{1-theta} norm_r^theta)
    // The equivalent additive form h^theta ||x||_r + (1/h) ||x||_0 at its
    // minimizing h > 0. Derived column only; the multiplicative ratio above
    // is what the check tests.
    double additive_form = 0.0;
    bool skipped = false;
  };
  std::vector<Sample> samples;
  double fitted_constant = 0.0;  // smallest admissible C over the sample
  std::size_t violations = 0;    // samples with ratio > 1 + 1e-9
  std::size_t skipped = 0;
  std::string note;
};

inline DNReport dn_check(const std::vector<GradedMatrix>& samples, int q, int r,
                         double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("dn_check: theta must lie in (0, 1)");
  if (r <= q) throw std::invalid_argument("dn_check: r must exceed q");

  DNReport rep;
  rep.q = q;
  rep.r = r;
  rep.theta = theta;
  for (const auto& x : samples) {
    DNReport::Sample s;
    s.norm_0 = x.op_norm(0);
    if (s.norm_0 == 0.0) {
      s.skipped = true;
      ++rep.skipped;
      rep.samples.push_back(s);
      continue;
    }
    s.norm_q = x.op_norm(q);
    s.norm_r = x.op_norm(r);
    s.ratio = s.norm_q / (std::pow(s.norm_0, 1.0 - theta) * std::pow(s.norm_r, theta));
    const double h_star = std::pow(s.norm_0 / (theta * s.norm_r), 1.0 / (1.0 + theta));
    s.additive_form = std::pow(h_star, theta) * s.norm_r + s.norm_0 / h_star;
    rep.fitted_constant = std::max(rep.fitted_constant, s.ratio);
    if (s.ratio > 1.0 + 1e-9) ++rep.violations;
    rep.samples.push_back(s);
  }
  if (rep.skipped > 0) rep.note = "zero samples skipped (all norms vanish)";

  const bool canonical = (r == 2 * q) && theta == 0.5;
  if (canonical && rep.fitted_constant > 1.0 + 1e-9)
    throw std::runtime_error("dn_check: Heinz configuration exceeded C = 1");
  return rep;
}

struct FitResult {
  double slope = 0.0;
  double residual = 0.0;  // rms in log-log coordinates
  bool valid = false;
};

struct DecayReport {
  std::vector<int> grades;
  std::map<std::string, std::vector<double>> sequences;
  std::map<std::string, FitResult> fitted_exponents;
  std::map<std::string, bool> verdicts;
  std::string note;
};

namespace diag_detail {

// OLS of log(value) against log(n), n 1-based, skipping n <= skip and zeros.
inline FitResult loglog_fit(const std::vector<double>& values, std::size_t skip = 2) {
  FitResult fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t n = skip + 1; n <= values.size(); ++n) {
    const double v = values[n - 1];
    if (v <= 0.0) continue;
    const double lx = std::log(static_cast<double>(n)), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return fit;
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / static_cast<double>(m);
  double rss = 0.0;
  for (std::size_t n = skip + 1; n <= values.size(); ++n) {
    const double v = values[n - 1];
    if (v <= 0.0) continue;
    const double e = std::log(v) - (intercept + fit.slope * std::log(static_cast<double>(n)));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(m));
  fit.valid = true;
  return fit;
}

// Running supremum stabilizes when the last quarter adds less than 1%.
inline bool sup_stabilizes(const std::vector<double>& running_sup) {
  if (running_sup.empty()) return true;
  const std::size_t m = running_sup.size();
  const std::size_t head = m - std::max<std::size_t>(m / 4, 1);
  const double before = running_sup[head == 0 ? 0 : head - 1];
  const double total = running_sup.back();
  if (before == 0.0) return total == 0.0;
  return total <= before * 1.01;
}

}  // namespace diag_detail

// Running suprema of |lambda_n|^theta row_q[n] and of the pair products
// |lambda_n|^theta row_q[n] row_q'[n]. The explicit constant from the
// two-hypothesis bound, C_1^{1-theta} C_2^theta with C_1 = sup row_0 and
// C_2 = sup |lambda_n| row_r[n] at r = ceil(q/theta) (the grade at which the
// finite-scale dominating norm holds with C = 1), is attached as a one-point
// reference sequence whenever those rows are present.
inline DecayReport interpolation_check(const std::vector<double>& lambdas,
                                       const std::map<int, std::vector<double>>& norm_rows,
                                       double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw std::invalid_argument("interpolation_check: theta must lie in (0, 1]");
  if (lambdas.empty()) throw std::invalid_argument("interpolation_check: empty input");
  for (const auto& [q, row] : norm_rows)
    if (row.size() != lambdas.size())
      throw std::invalid_argument("interpolation_check: row length mismatch at grade " +
                                  std::to_string(q));

  DecayReport rep;
  for (const auto& [q, row] : norm_rows) rep.grades.push_back(q);

  auto add_sup_sequence = [&](const std::string& label, const std::vector<double>& seq) {
    std::vector<double> running;
    double sup = 0.0;
    for (double v : seq) {
      sup = std::max(sup, v);
      running.push_back(sup);
    }
    rep.sequences[label] = seq;
    rep.sequences["sup:" + label] = running;
    rep.fitted_exponents[label] = diag_detail::loglog_fit(seq);
    rep.verdicts[label] = diag_detail::sup_stabilizes(running);
  };

  for (const auto& [q, row] : norm_rows) {
    std::vector<double> seq(lambdas.size());
    for (std::size_t n = 0; n < lambdas.size(); ++n)
      seq[n] = std::pow(std::abs(lambdas[n]), theta) * row[n];
    add_sup_sequence("q=" + std::to_string(q), seq);
  }

  for (auto it = norm_rows.begin(); it != norm_rows.end(); ++it)
    for (auto jt = it; jt != norm_rows.end(); ++jt) {
      std::vector<double> seq(lambdas.size());
      for (std::size_t n = 0; n < lambdas.size(); ++n)
        seq[n] = std::pow(std::abs(lambdas[n]), theta) * it->second[n] * jt->second[n];
      add_sup_sequence("q=" + std::to_string(it->first) + "*q'=" + std::to_string(jt->first),
                       seq);
    }

  // Reference constants from the proof-shaped bound.
  if (norm_rows.count(0)) {
    double c1 = 0.0;
    for (double v : norm_rows.at(0)) c1 = std::max(c1, v);
    for (const auto& [q, row] : norm_rows) {
      const int r = static_cast<int>(std::ceil(static_cast<double>(q) / theta));
      if (!norm_rows.count(r)) continue;
      double c2 = 0.0;
      for (std::size_t n = 0; n < lambdas.size(); ++n)
        c2 = std::max(c2, std::abs(lambdas[n]) * norm_rows.at(r)[n]);
      rep.sequences["bound:q=" + std::to_string(q)] = {
          std::pow(c1, 1.0 - theta) * std::pow(c2, theta)};
    }
  }
  return rep;
}

// Decay characterization across increasing truncations of one
// model family. Members must be normal and strictly increasing in dim.
inline DecayReport characterize(const std::vector<GradedMatrix>& x_family,
                                const std::vector<int>& grades,
                                const std::vector<double>& thetas) {
  if (x_family.size() < 2)
    throw std::invalid_argument("characterize: need at least two truncations");
  for (std::size_t i = 1; i < x_family.size(); ++i)
    if (x_family[i].dim() <= x_family[i - 1].dim())
      throw std::invalid_argument("characterize: dims must be strictly increasing");
  if (grades.empty() || thetas.empty())
    throw std::invalid_argument("characterize: empty grade or theta list");

  std::vector<SpectralDecomposition> decs;
  for (const auto& x : x_family) decs.push_back(decompose(x));

  DecayReport rep;
  rep.grades = grades;

  const auto& last = decs.back();
  const auto& prev = decs[decs.size() - 2];

  std::size_t rank_last = 0, rank_prev = 0;
  for (std::size_t m : last.multiplicities) rank_last += m;
  for (std::size_t m : prev.multiplicities) rank_prev += m;
  const bool finite_case = rank_last == rank_prev && last.count() == prev.count();

  // Sequences at the largest truncation.
  std::vector<double> lam_abs;
  for (cd lam : last.eigenvalues) lam_abs.push_back(std::abs(lam));
  rep.sequences["lambda"] = lam_abs;
  for (int q : grades) {
    std::vector<double> norms;
    for (const auto& p : last.projections) norms.push_back(p.op_norm(q));
    rep.sequences["norm:q=" + std::to_string(q)] = norms;
  }

  bool all_pass = true;
  for (int q : grades) {
    const auto& norms = rep.sequences.at("norm:q=" + std::to_string(q));
    for (double theta : thetas) {
      std::vector<double> seq(lam_abs.size());
      for (std::size_t n = 0; n < seq.size(); ++n)
        seq[n] = std::pow(lam_abs[n], theta) * norms[n];
      const std::string label =
          "decay:q=" + std::to_string(q) + ",theta=" + std::to_string(theta);
      rep.sequences[label] = seq;
      if (!finite_case) {
        const auto fit = diag_detail::loglog_fit(seq);
        rep.fitted_exponents[label] = fit;
        const bool pass = fit.valid && fit.slope <= -1.0;
        rep.verdicts[label] = pass;
        all_pass = all_pass && pass;
      } else {
        rep.verdicts[label] = true;
      }
    }
  }

  // Cross-truncation stability of sup and sum rows.
  for (int q : grades) {
    std::vector<double> sups, sums;
    for (const auto& d : decs) {
      double sup = 0.0, sum = 0.0;
      for (std::size_t n = 0; n < d.count(); ++n) {
        const double v = std::abs(d.eigenvalues[n]) * d.projections[n].op_norm(q);
        sup = std::max(sup, v);
        sum += v;
      }
      sups.push_back(sup);
      sums.push_back(sum);
    }
    rep.sequences["sup:q=" + std::to_string(q)] = sups;
    rep.sequences["sum:q=" + std::to_string(q)] = sums;
    if (!finite_case) {
      const bool sup_ok =
          sups.back() <= sups[sups.size() - 2] * 1.01 + 1e-300;
      const bool sum_ok =
          sums.back() <= sums[sums.size() - 2] * 1.01 + 1e-300;
      rep.verdicts["sup:q=" + std::to_string(q)] = sup_ok;
      rep.verdicts["sum:q=" + std::to_string(q)] = sum_ok;
      all_pass = all_pass && sup_ok && sum_ok;
    }
  }

  if (finite_case) {
    rep.note = "finite case: rank saturates, membership reduces to the projections";
    rep.verdicts["overall"] = true;
  } else {
    rep.verdicts["overall"] = all_pass;
  }
  return rep;
}

}  // namespace smoothop
