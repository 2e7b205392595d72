// smoothop/io.hpp
//
// Serialization of every value the tool reads or writes.
//
// Wire formats:
//   vector  {"dim": N, "re": [...], "im": [...]}
//   matrix  {"dim": N, "re": [[row-major rows]], "im": [[...]]}
//   matrix CSV: two N x N blocks (re, then im) separated by one blank line
//   decomposition {"eigenvalues": [{"re","im"}], "multiplicities": [...],
//                  "projections": [matrix...]}
//   extraction trace: error and bound arrays keyed by grade
//   projection family: projections plus the minimal/complete flags
//   koethe {"grades": [...], "norm_table": [[...]], "ratios": {"q,r": [...]}}
//
// Text shorthands accepted on the command line:
//   models  diag-power:alpha=2,dim=64      diag-exp:beta=0.5,dim=32
//           unit-projection:n=2,dim=8      smooth-random:p=3,seed=1,dim=16
//           rank-one:@vector.json          @spec.json (full JSON spec)
//   functions  power:0.5   poly:0,1,2   table:@file.json
//
// Doubles pass through nlohmann::json's shortest-round-trip printer, so equal
// values serialize to equal bytes and reports are reproducible.

#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smoothop/calculus.hpp"
#include "smoothop/diagnostics.hpp"
#include "smoothop/graded.hpp"
#include "smoothop/matrix.hpp"
#include "smoothop/models.hpp"
#include "smoothop/spectral.hpp"
#include "smoothop/subalgebra.hpp"

namespace smoothop::io {

using json = nlohmann::json;

// ---------------------------------------------------------------- vectors

inline json to_json(const GradedVector& v) {
  json re = json::array(), im = json::array();
  for (const cd& z : v.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return json{{"dim", v.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline GradedVector vector_from_json(const json& j) {
  const auto dim = j.at("dim").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != dim || im.size() != dim)
    throw std::invalid_argument("vector JSON: re/im arrays must have length dim");
  std::vector<cd> entries(dim);
  for (std::size_t i = 0; i < dim; ++i)
    entries[i] = cd{re[i].get<double>(), im[i].get<double>()};
  return GradedVector(std::move(entries));
}

// ---------------------------------------------------------------- matrices

inline json to_json(const GradedMatrix& m) {
  const std::size_t n = m.dim();
  json re = json::array(), im = json::array();
  for (std::size_t r = 0; r < n; ++r) {
    json rrow = json::array(), irow = json::array();
    for (std::size_t c = 0; c < n; ++c) {
      rrow.push_back(m.at(r, c).real());
      irow.push_back(m.at(r, c).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline GradedMatrix matrix_from_json(const json& j) {
  const auto n = j.at("dim").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != n || im.size() != n)
    throw std::invalid_argument("matrix JSON: re/im must hold dim rows");
  std::vector<cd> a(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (re[r].size() != n || im[r].size() != n)
      throw std::invalid_argument("matrix JSON: row " + std::to_string(r) +
                                  " has wrong length");
    for (std::size_t c = 0; c < n; ++c)
      a[r * n + c] = cd{re[r][c].get<double>(), im[r][c].get<double>()};
  }
  return GradedMatrix(n, std::move(a));
}

inline std::string matrix_to_csv(const GradedMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t n = m.dim();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) os << ',';
      os << m.at(r, c).real();
    }
    os << '\n';
  }
  os << '\n';
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) os << ',';
      os << m.at(r, c).imag();
    }
    os << '\n';
  }
  return os.str();
}

inline GradedMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> re, im;
  bool in_second = false;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (!re.empty()) in_second = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("matrix CSV: unparseable cell '" + cell + "'");
      }
    }
    (in_second ? im : re).push_back(std::move(row));
  }
  if (re.empty() || re.size() != im.size())
    throw std::invalid_argument("matrix CSV: expected two equal blocks separated by a blank line");
  const std::size_t n = re.size();
  std::vector<cd> a(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (re[r].size() != n || im[r].size() != n)
      throw std::invalid_argument("matrix CSV: row " + std::to_string(r) +
                                  " has wrong length");
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = cd{re[r][c], im[r][c]};
  }
  return GradedMatrix(n, std::move(a));
}

// ---------------------------------------------------------------- spectral

inline json to_json(const SpectralDecomposition& d) {
  json ev = json::array();
  for (cd lam : d.eigenvalues) ev.push_back(json{{"re", lam.real()}, {"im", lam.imag()}});
  json projs = json::array();
  for (const auto& p : d.projections) projs.push_back(to_json(p));
  return json{{"dim", d.dim},
              {"eigenvalues", std::move(ev)},
              {"multiplicities", d.multiplicities},
              {"projections", std::move(projs)}};
}

inline json to_json(const ExtractionTrace& t) {
  json errors = json::object(), bounds = json::object();
  for (const auto& [q, vals] : t.error_q) errors[std::to_string(q)] = vals;
  for (const auto& [q, vals] : t.bound_q) bounds[std::to_string(q)] = vals;
  return json{{"grades", t.grades}, {"ks", t.ks}, {"errors", std::move(errors)},
              {"bounds", std::move(bounds)}};
}

// ---------------------------------------------------------------- families

inline json to_json(const ProjectionFamily& f) {
  json projs = json::array();
  for (const auto& p : f.projections) projs.push_back(to_json(p));
  return json{{"dim", f.dim},
              {"minimal", f.minimal},
              {"complete", f.complete},
              {"projections", std::move(projs)}};
}

inline json to_json(const KoetheRepresentation& k) {
  json ratios = json::object();
  for (const auto& [qr, partial] : k.ratio_diagnostics)
    ratios[std::to_string(qr.first) + "," + std::to_string(qr.second)] = partial;
  json chain = json::array();
  for (const auto& row : k.chain_rows)
    chain.push_back(json{{"n", row.n}, {"q", row.q}, {"e_q", row.e_q},
                         {"p_q", row.p_q}, {"e_2q", row.e_2q}});
  return json{{"grades", k.grades},
              {"norm_table", k.norm_table},
              {"ratios", std::move(ratios)},
              {"chain_rows", std::move(chain)},
              {"chain_max_violation", k.chain_max_violation}};
}

// ------------------------------------------------------------- diagnostics

inline json to_json(const DNReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back(json{{"norm_q", s.norm_q}, {"norm_0", s.norm_0},
                           {"norm_r", s.norm_r}, {"ratio", s.ratio},
                           {"additive_form", s.additive_form},
                           {"skipped", s.skipped}});
  return json{{"q", r.q}, {"r", r.r}, {"theta", r.theta},
              {"fitted_constant", r.fitted_constant}, {"violations", r.violations},
              {"skipped", r.skipped}, {"note", r.note}, {"samples", std::move(samples)}};
}

inline json to_json(const DecayReport& r) {
  json fits = json::object();
  for (const auto& [label, fit] : r.fitted_exponents)
    fits[label] = json{{"slope", fit.slope}, {"residual", fit.residual},
                       {"valid", fit.valid}};
  return json{{"grades", r.grades}, {"sequences", r.sequences},
              {"fitted_exponents", std::move(fits)}, {"verdicts", r.verdicts},
              {"note", r.note}};
}

// One row per index, one column per sequence label; shorter sequences leave
// trailing cells empty. Intended for external plotting.
inline std::string decay_report_to_csv(const DecayReport& r) {
  std::vector<std::string> labels;
  std::size_t rows = 0;
  for (const auto& [label, seq] : r.sequences) {
    labels.push_back(label);
    rows = std::max(rows, seq.size());
  }
  std::ostringstream os;
  os.precision(17);
  os << "n";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  for (std::size_t n = 0; n < rows; ++n) {
    os << (n + 1);
    for (const auto& l : labels) {
      const auto& seq = r.sequences.at(l);
      os << ',';
      if (n < seq.size()) os << seq[n];
    }
    os << '\n';
  }
  return os.str();
}

inline std::string dn_report_to_csv(const DNReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "sample,norm_q,norm_0,norm_r,ratio,skipped\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    os << i << ',' << s.norm_q << ',' << s.norm_0 << ',' << s.norm_r << ','
       << s.ratio << ',' << (s.skipped ? 1 : 0) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------------ models

inline json to_json(const ModelSpec& s) {
  switch (s.kind) {
    case ModelSpec::Kind::DiagPower:
      return json{{"kind", "diag_power"}, {"alpha", s.alpha}, {"dim", s.dim}};
    case ModelSpec::Kind::DiagExp:
      return json{{"kind", "diag_exp"}, {"beta", s.beta}, {"dim", s.dim}};
    case ModelSpec::Kind::UnitProjection:
      return json{{"kind", "unit_projection"}, {"n", s.index}, {"dim", s.dim}};
    case ModelSpec::Kind::RankOne: {
      json re = json::array(), im = json::array();
      for (const cd& z : s.vector_entries) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      return json{{"kind", "rank_one"}, {"dim", s.dim}, {"re", std::move(re)},
                  {"im", std::move(im)}};
    }
    case ModelSpec::Kind::SmoothRandom:
      return json{{"kind", "smooth_random"}, {"p", s.p}, {"seed", s.seed}, {"dim", s.dim}};
    case ModelSpec::Kind::GivensConjugated: {
      json rots = json::array();
      for (const auto& rot : s.rotations)
        rots.push_back(json{{"i", rot.i}, {"j", rot.j}, {"angle", rot.angle}});
      return json{{"kind", "givens_conjugated"}, {"dim", s.dim},
                  {"base", to_json(*s.base)}, {"rotations", std::move(rots)}};
    }
  }
  throw std::logic_error("ModelSpec: unknown kind");
}

inline ModelSpec model_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "diag_power")
    return ModelSpec::diag_power(j.at("alpha").get<double>(), j.at("dim").get<std::size_t>());
  if (kind == "diag_exp")
    return ModelSpec::diag_exp(j.at("beta").get<double>(), j.at("dim").get<std::size_t>());
  if (kind == "unit_projection")
    return ModelSpec::unit_projection(j.at("n").get<std::size_t>(),
                                      j.at("dim").get<std::size_t>());
  if (kind == "rank_one") {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != im.size())
      throw std::invalid_argument("rank_one spec: re/im length mismatch");
    std::vector<cd> entries(re.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
      entries[i] = cd{re[i].get<double>(), im[i].get<double>()};
    return ModelSpec::rank_one(std::move(entries));
  }
  if (kind == "smooth_random")
    return ModelSpec::smooth_random(j.at("p").get<double>(), j.at("seed").get<std::uint64_t>(),
                                    j.at("dim").get<std::size_t>());
  if (kind == "givens_conjugated") {
    std::vector<GivensRotation> rots;
    for (const auto& r : j.at("rotations"))
      rots.push_back({r.at("i").get<std::size_t>(), r.at("j").get<std::size_t>(),
                      r.at("angle").get<double>()});
    return ModelSpec::givens_conjugated(model_from_json(j.at("base")), std::move(rots));
  }
  throw std::invalid_argument("model JSON: unknown kind '" + kind + "'");
}

// --------------------------------------------------------------- functions

inline json to_json(const SpectralFunction& f) {
  switch (f.kind()) {
    case SpectralFunction::Kind::Power:
      return json{{"kind", "power"}, {"theta", f.theta()}};
    case SpectralFunction::Kind::Polynomial: {
      json re = json::array(), im = json::array();
      for (const cd& c : f.coeffs()) {
        re.push_back(c.real());
        im.push_back(c.imag());
      }
      return json{{"kind", "polynomial"}, {"re", std::move(re)}, {"im", std::move(im)}};
    }
    case SpectralFunction::Kind::Table: {
      json pairs = json::array();
      for (const auto& [lam, val] : f.pairs())
        pairs.push_back(json{{"lambda", {{"re", lam.real()}, {"im", lam.imag()}}},
                             {"value", {{"re", val.real()}, {"im", val.imag()}}}});
      return json{{"kind", "table"}, {"pairs", std::move(pairs)}};
    }
  }
  throw std::logic_error("SpectralFunction: unknown kind");
}

inline SpectralFunction function_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "power") return SpectralFunction::power(j.at("theta").get<double>());
  if (kind == "polynomial") {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != im.size())
      throw std::invalid_argument("polynomial spec: re/im length mismatch");
    std::vector<cd> coeffs(re.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      coeffs[i] = cd{re[i].get<double>(), im[i].get<double>()};
    return SpectralFunction::polynomial(std::move(coeffs));
  }
  if (kind == "table") {
    std::vector<std::pair<cd, cd>> pairs;
    for (const auto& p : j.at("pairs"))
      pairs.emplace_back(cd{p.at("lambda").at("re").get<double>(),
                            p.at("lambda").at("im").get<double>()},
                         cd{p.at("value").at("re").get<double>(),
                            p.at("value").at("im").get<double>()});
    return SpectralFunction::table(std::move(pairs));
  }
  throw std::invalid_argument("function JSON: unknown kind '" + kind + "'");
}

inline json to_json(const HolderEstimate& h) {
  json samples = json::array();
  for (const auto& [t, v] : h.sample_points) samples.push_back(json::array({t, v}));
  return json{{"theta", h.theta}, {"constant", h.constant}, {"residual", h.residual},
              {"samples", std::move(samples)}};
}

// ------------------------------------------------------------- text forms

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace text_detail {

inline std::map<std::string, std::string> parse_kv(const std::string& body,
                                                   const std::string& context) {
  std::map<std::string, std::string> kv;
  std::istringstream is(body);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(context + ": expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

inline double want_double(const std::map<std::string, std::string>& kv,
                          const std::string& key, const std::string& context) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument(context + ": missing field '" + key + "'");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument(context + ": field '" + key + "' is not a number");
  }
}

inline std::uint64_t want_u64(const std::map<std::string, std::string>& kv,
                              const std::string& key, const std::string& context) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument(context + ": missing field '" + key + "'");
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument(context + ": field '" + key + "' is not an integer");
  }
}

}  // namespace text_detail

// diag-power:alpha=2,dim=64 and friends; @file.json loads a full JSON spec.
inline ModelSpec parse_model_text(const std::string& text) {
  if (!text.empty() && text.front() == '@')
    return model_from_json(json::parse(slurp(text.substr(1))));
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("model spec: expected kind:key=value,... in '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  using text_detail::parse_kv;
  using text_detail::want_double;
  using text_detail::want_u64;
  if (kind == "rank-one") {
    if (body.empty() || body.front() != '@')
      throw std::invalid_argument("rank-one model: expected rank-one:@vector.json");
    return ModelSpec::rank_one(vector_from_json(json::parse(slurp(body.substr(1)))).entries());
  }
  const auto kv = parse_kv(body, "model spec '" + kind + "'");
  if (kind == "diag-power")
    return ModelSpec::diag_power(want_double(kv, "alpha", kind),
                                 want_u64(kv, "dim", kind));
  if (kind == "diag-exp")
    return ModelSpec::diag_exp(want_double(kv, "beta", kind), want_u64(kv, "dim", kind));
  if (kind == "unit-projection")
    return ModelSpec::unit_projection(want_u64(kv, "n", kind), want_u64(kv, "dim", kind));
  if (kind == "smooth-random")
    return ModelSpec::smooth_random(want_double(kv, "p", kind), want_u64(kv, "seed", kind),
                                    want_u64(kv, "dim", kind));
  throw std::invalid_argument("model spec: unknown kind '" + kind + "'");
}

// power:0.5 | poly:0,1,2 | table:@file.json
inline SpectralFunction parse_function_text(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("function spec: expected kind:... in '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "power") {
    try {
      return SpectralFunction::power(std::stod(body));
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("power function: bad exponent '" + body + "'");
    }
  }
  if (kind == "poly") {
    std::vector<cd> coeffs;
    std::istringstream is(body);
    std::string cell;
    while (std::getline(is, cell, ',')) {
      try {
        coeffs.emplace_back(std::stod(cell), 0.0);
      } catch (const std::exception&) {
        throw std::invalid_argument("poly function: bad coefficient '" + cell + "'");
      }
    }
    return SpectralFunction::polynomial(std::move(coeffs));
  }
  if (kind == "table") {
    if (body.empty() || body.front() != '@')
      throw std::invalid_argument("table function: expected table:@file.json");
    return function_from_json(json::parse(slurp(body.substr(1))));
  }
  throw std::invalid_argument("function spec: unknown kind '" + kind + "'");
}

// Matrix file loader: .csv by extension, JSON otherwise.
inline GradedMatrix load_matrix(const std::string& path) {
  const std::string body = slurp(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return matrix_from_csv(body);
  try {
    return matrix_from_json(json::parse(body));
  } catch (const json::exception& e) {
    throw std::invalid_argument("matrix file '" + path + "': " + e.what());
  }
}

// FNV-1a, 64-bit; reports embed these so experiment tables self-certify.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  std::ostringstream os;
  os << "0x" << std::hex << fnv1a64(bytes);
  return os.str();
}

}  // namespace smoothop::io
