// smoothop/run.hpp
//
// The batch runner behind the CLI. One command per invocation; the report is
// a self-describing JSON envelope carrying the tool version, the effective
// configuration (tolerances included), an FNV-1a content hash per input, and
// the command's result. Identical configuration and inputs produce byte-
// identical reports. File output is atomic (temp file in the target
// directory, then rename).
//
// Exit codes: 0 success, 1 validation error (unparseable input, bad flags,
// dimension mismatches), 2 numerical failure (non-normal input to a spectral
// command, tolerance violations, range overflow).

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothop/io.hpp"
#include "smoothop/version.hpp"

namespace smoothop {

struct RunConfig {
  std::string command;  // norms|spectral|extract|recover|calculus|subalgebra|dn|characterize|gen
  std::vector<std::string> inputs;  // matrix files (.csv or JSON)
  std::string model;                // model text form, or @spec.json

  std::vector<int> grades{0, 1, 2, 3, 4};
  double cluster_tol = defaults::cluster_tol;
  double zero_tol = defaults::zero_tol;

  std::size_t k_max = 12;    // extract
  int q = 2;                 // dn
  double theta = 0.5;        // dn
  std::size_t samples = 20;  // dn batch size when a model is given
  std::uint64_t seed = 1;    // dn batch seed base
  std::vector<double> thetas{0.5, 1.0};     // characterize
  std::vector<std::size_t> dims;            // characterize truncations
  std::string fn;                           // calculus function text
  double holder_radius = 0.0;               // 0: max |lambda| of the input
  std::size_t holder_samples = 32;

  std::string output;         // empty: stdout
  std::string format = "json";  // json|csv
};

namespace run_detail {

using io::json;

struct LoadedInput {
  std::string source;
  std::string hash;
  GradedMatrix matrix;
};

inline std::vector<LoadedInput> load_inputs(const RunConfig& cfg) {
  std::vector<LoadedInput> loaded;
  for (const auto& path : cfg.inputs) {
    const std::string body = io::slurp(path);
    GradedMatrix m = io::load_matrix(path);
    loaded.push_back({"file:" + path, io::fnv1a64_hex(body), std::move(m)});
  }
  if (!cfg.model.empty()) {
    const ModelSpec spec = io::parse_model_text(cfg.model);
    const std::string canonical = io::to_json(spec).dump();
    loaded.push_back({"model:" + cfg.model, io::fnv1a64_hex(canonical), generate(spec)});
  }
  return loaded;
}

inline json config_echo(const RunConfig& cfg) {
  json j{{"command", cfg.command},
         {"inputs", cfg.inputs},
         {"model", cfg.model},
         {"grades", cfg.grades},
         {"output", cfg.output},
         {"format", cfg.format}};
  if (cfg.command == "extract") j["k_max"] = cfg.k_max;
  if (cfg.command == "dn") {
    j["q"] = cfg.q;
    j["theta"] = cfg.theta;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
  }
  if (cfg.command == "characterize") {
    j["thetas"] = cfg.thetas;
    j["dims"] = cfg.dims;
  }
  if (cfg.command == "calculus") {
    j["fn"] = cfg.fn;
    j["holder_radius"] = cfg.holder_radius;
    j["holder_samples"] = cfg.holder_samples;
  }
  return j;
}

inline json tolerance_echo(const RunConfig& cfg) {
  return json{{"cluster_tol", cfg.cluster_tol},
              {"zero_tol", cfg.zero_tol},
              {"normal_tol", defaults::normal_tol},
              {"invertibility_tol", defaults::invertibility_tol},
              {"commutant_sigma_tol", defaults::commutant_sigma_tol},
              {"distinct_coeff_tol", defaults::distinct_coeff_tol}};
}

// Atomic write: temp file next to the target, then rename.
inline void write_output(const std::string& path, const std::string& bytes,
                         std::ostream& out) {
  if (path.empty()) {
    out << bytes;
    if (bytes.empty() || bytes.back() != '\n') out << '\n';
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot open output file: " + tmp.string());
    f << bytes;
  }
  fs::rename(tmp, target);
}

inline const GradedMatrix& single_input(const std::vector<LoadedInput>& loaded,
                                        const std::string& command) {
  if (loaded.size() != 1)
    throw std::invalid_argument(command + ": expected exactly one input matrix or model");
  return loaded.front().matrix;
}

inline json cmd_norms(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  const GradedMatrix& x = single_input(loaded, "norms");
  json op = json::array(), mat = json::array();
  for (int q : cfg.grades) {
    op.push_back(x.op_norm(q));
    mat.push_back(x.matrix_norm(q));
  }
  return json{{"dim", x.dim()}, {"grades", cfg.grades}, {"op_norms", std::move(op)},
              {"matrix_norms", std::move(mat)}};
}

inline json cmd_spectral(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  const GradedMatrix& x = single_input(loaded, "spectral");
  const auto d = decompose(x, cfg.cluster_tol, cfg.zero_tol);
  const auto recon = reconstruct(d);
  json residuals = json::array();
  for (int q : cfg.grades) {
    const double nx = x.op_norm(q);
    residuals.push_back(nx == 0.0 ? 0.0 : (x - recon).op_norm(q) / nx);
  }
  json j = io::to_json(d);
  j["relative_reconstruction_residuals"] = std::move(residuals);
  j["residual_grades"] = cfg.grades;
  // At truncation only the nonzero part is listed; zero always belongs to the
  // spectrum of the infinite-dimensional model.
  j["zero_in_spectrum_of_infinite_model"] = true;
  return j;
}

inline json cmd_extract(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  const GradedMatrix& x = single_input(loaded, "extract");
  const auto tr = extract_leading_projection(x, cfg.k_max, cfg.grades);
  return io::to_json(tr);
}

inline json cmd_recover(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  (void)cfg;
  if (loaded.empty())
    throw std::invalid_argument("recover: expected the element as the first input");
  std::vector<GradedMatrix> span;
  for (std::size_t i = 1; i < loaded.size(); ++i) span.push_back(loaded[i].matrix);
  const auto rec = recover_idempotents(loaded.front().matrix, span);
  json out = json::array();
  for (const auto& [lam, idem] : rec)
    out.push_back(json{{"lambda", {{"re", lam.real()}, {"im", lam.imag()}}},
                       {"idempotent", io::to_json(idem)}});
  return json{{"count", rec.size()}, {"idempotents", std::move(out)}};
}

inline json cmd_calculus(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  if (cfg.fn.empty()) throw std::invalid_argument("calculus: missing --fn");
  const GradedMatrix& x = single_input(loaded, "calculus");
  const auto f = io::parse_function_text(cfg.fn);
  const auto d = decompose(x, cfg.cluster_tol, cfg.zero_tol);
  const auto fx = apply(f, d);

  json j{{"fn", io::to_json(f)}, {"result", io::to_json(fx)}};
  if (f.kind() != SpectralFunction::Kind::Table || !f.pairs().empty()) {
    double radius = cfg.holder_radius;
    if (radius <= 0.0) {
      for (cd lam : d.eigenvalues) radius = std::max(radius, std::abs(lam));
      if (radius <= 0.0) radius = 1.0;
    }
    const auto h = estimate_holder(f, radius, cfg.holder_samples);
    j["holder"] = io::to_json(h);
    json lhs = json::array(), rhs = json::array();
    for (int q : cfg.grades) {
      const auto [l, r] = membership_bound(f, d, h, q);
      lhs.push_back(l);
      rhs.push_back(r);
    }
    j["membership_lhs"] = std::move(lhs);
    j["membership_rhs"] = std::move(rhs);
    j["membership_grades"] = cfg.grades;
  }
  return j;
}

inline json cmd_subalgebra(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  if (loaded.empty())
    throw std::invalid_argument("subalgebra: expected at least one generator");
  std::vector<GradedMatrix> gens;
  for (const auto& l : loaded) gens.push_back(l.matrix);
  const auto fam = minimal_basis(gens);

  std::vector<std::pair<int, int>> ratio_pairs;
  for (std::size_t i = 0; i + 1 < cfg.grades.size(); ++i)
    ratio_pairs.emplace_back(cfg.grades[i], cfg.grades[i + 1]);
  const auto rep = koethe_representation(fam, cfg.grades, ratio_pairs);
  const auto [gen, lambda] = single_generator(fam, cfg.grades);
  const bool maximal = is_maximal_commutative(fam);
  const auto comm = commutant(gens);

  return json{{"family", io::to_json(fam)},
              {"koethe", io::to_json(rep)},
              {"single_generator", io::to_json(gen)},
              {"single_generator_lambdas", lambda},
              {"maximal_commutative", maximal},
              {"commutant_dimension", comm.size()}};
}

inline json cmd_dn(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  std::vector<GradedMatrix> samples;
  if (!cfg.model.empty()) {
    // Seeded batch: the model's seed field is replaced by seed, seed+1, ...
    ModelSpec spec = io::parse_model_text(cfg.model);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      spec.seed = cfg.seed + i;
      samples.push_back(generate(spec));
    }
    for (const auto& l : loaded)
      if (l.source.rfind("file:", 0) == 0) samples.push_back(l.matrix);
  } else {
    for (const auto& l : loaded) samples.push_back(l.matrix);
  }
  if (samples.empty()) throw std::invalid_argument("dn: no samples");
  const auto rep = dn_check(samples, cfg.q, 2 * cfg.q, cfg.theta);
  return io::to_json(rep);
}

inline json cmd_characterize(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  std::vector<GradedMatrix> family;
  if (!cfg.model.empty()) {
    if (cfg.dims.size() < 2)
      throw std::invalid_argument("characterize: need --dims with at least two entries");
    ModelSpec spec = io::parse_model_text(cfg.model);
    for (std::size_t dim : cfg.dims) {
      spec.dim = dim;
      family.push_back(generate(spec));
    }
  } else {
    for (const auto& l : loaded) family.push_back(l.matrix);
  }
  const auto rep = characterize(family, cfg.grades, cfg.thetas);
  return io::to_json(rep);
}

inline json cmd_gen(const RunConfig& cfg, const std::vector<LoadedInput>& loaded) {
  if (cfg.model.empty()) throw std::invalid_argument("gen: missing --model");
  const GradedMatrix& x = loaded.back().matrix;  // the model is loaded last
  return io::to_json(x);
}

}  // namespace run_detail

// Executes one command and writes the report. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  using run_detail::json;
  try {
    const auto loaded = run_detail::load_inputs(cfg);

    json result;
    std::string csv;  // non-empty if the command supports --format csv
    if (cfg.command == "norms") {
      result = run_detail::cmd_norms(cfg, loaded);
    } else if (cfg.command == "spectral") {
      result = run_detail::cmd_spectral(cfg, loaded);
    } else if (cfg.command == "extract") {
      result = run_detail::cmd_extract(cfg, loaded);
    } else if (cfg.command == "recover") {
      result = run_detail::cmd_recover(cfg, loaded);
    } else if (cfg.command == "calculus") {
      result = run_detail::cmd_calculus(cfg, loaded);
    } else if (cfg.command == "subalgebra") {
      result = run_detail::cmd_subalgebra(cfg, loaded);
    } else if (cfg.command == "dn") {
      result = run_detail::cmd_dn(cfg, loaded);
    } else if (cfg.command == "characterize") {
      result = run_detail::cmd_characterize(cfg, loaded);
    } else if (cfg.command == "gen") {
      result = run_detail::cmd_gen(cfg, loaded);
    } else {
      throw std::invalid_argument("unknown command: " + cfg.command);
    }

    std::string bytes;
    if (cfg.format == "csv") {
      if (cfg.command == "gen") {
        bytes = io::matrix_to_csv(io::matrix_from_json(result));
      } else if (cfg.command == "dn") {
        std::ostringstream os;
        os.precision(17);
        os << "sample,norm_q,norm_0,norm_r,ratio,skipped\n";
        std::size_t i = 0;
        for (const auto& s : result.at("samples")) {
          os << i++ << ',' << s.at("norm_q").get<double>() << ','
             << s.at("norm_0").get<double>() << ',' << s.at("norm_r").get<double>()
             << ',' << s.at("ratio").get<double>() << ','
             << (s.at("skipped").get<bool>() ? 1 : 0) << '\n';
        }
        bytes = os.str();
      } else if (cfg.command == "characterize" || cfg.command == "norms" ||
                 cfg.command == "extract") {
        // Generic table: one row per index, one column per sequence.
        std::map<std::string, std::vector<double>> table;
        if (cfg.command == "norms") {
          for (std::size_t i = 0; i < cfg.grades.size(); ++i) {
            table["op_norm[q=" + std::to_string(cfg.grades[i]) + "]"] = {
                result.at("op_norms")[i].get<double>()};
            table["matrix_norm[q=" + std::to_string(cfg.grades[i]) + "]"] = {
                result.at("matrix_norms")[i].get<double>()};
          }
        } else if (cfg.command == "extract") {
          for (const auto& [key, vals] : result.at("errors").items())
            table["error[q=" + key + "]"] = vals.get<std::vector<double>>();
          for (const auto& [key, vals] : result.at("bounds").items())
            table["bound[q=" + key + "]"] = vals.get<std::vector<double>>();
        } else {
          for (const auto& [key, vals] : result.at("sequences").items())
            table[key] = vals.get<std::vector<double>>();
        }
        std::size_t rows = 0;
        for (const auto& [k, v] : table) rows = std::max(rows, v.size());
        std::ostringstream os;
        os.precision(17);
        os << "n";
        for (const auto& [k, v] : table) os << ',' << k;
        os << '\n';
        for (std::size_t r = 0; r < rows; ++r) {
          os << (r + 1);
          for (const auto& [k, v] : table) {
            os << ',';
            if (r < v.size()) os << v[r];
          }
          os << '\n';
        }
        bytes = os.str();
      } else {
        throw std::invalid_argument("--format csv is not available for command '" +
                                    cfg.command + "'");
      }
    } else if (cfg.format == "json") {
      if (cfg.command == "gen") {
        // gen emits the data artifact itself, not a report envelope.
        bytes = result.dump(2);
        bytes.push_back('\n');
      } else {
        json inputs = json::array();
        for (const auto& l : loaded)
          inputs.push_back(json{{"source", l.source}, {"fnv1a64", l.hash}});
        const json report{{"tool", "smoothlab"},
                          {"version", kVersion},
                          {"command", cfg.command},
                          {"config", run_detail::config_echo(cfg)},
                          {"tolerances", run_detail::tolerance_echo(cfg)},
                          {"inputs", std::move(inputs)},
                          {"result", std::move(result)}};
        bytes = report.dump(2);
        bytes.push_back('\n');
      }
    } else {
      throw std::invalid_argument("unknown format: " + cfg.format);
    }

    run_detail::write_output(cfg.output, bytes, out);
    return 0;
  } catch (const nlohmann::json::exception& e) {
    err << "smoothlab: input error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "smoothlab: validation error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "smoothlab: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::range_error& e) {
    err << "smoothlab: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "smoothlab: numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace smoothop
