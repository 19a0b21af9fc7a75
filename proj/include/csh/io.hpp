#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csh/grid.hpp"
#include "csh/mountainpass.hpp"
#include "csh/params.hpp"
#include "csh/verify.hpp"

namespace csh {

struct RunConfig {
  PhysicalParams params{1.0, 1.0, 0.05, 1.0, 1.0};
  double R = 20.0;
  int n = 2048;
  std::optional<double> cutoff_T;  // empty means "auto": T = 10 |endpoint|_{H1}
  SolverConfig solver;
  std::uint64_t seed = 42;
  std::string out_dir = "./out";
  bool write_json = true;
  bool write_csv = true;
};

namespace detail {

inline void read_into(const nlohmann::json& j, const char* key, double& dst) {
  if (j.contains(key)) dst = j.at(key).get<double>();
}
inline void read_into(const nlohmann::json& j, const char* key, int& dst) {
  if (j.contains(key)) dst = j.at(key).get<int>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("params")) {
    const auto& p = j.at("params");
    detail::read_into(p, "m", c.params.m);
    detail::read_into(p, "omega", c.params.omega);
    detail::read_into(p, "e", c.params.e);
    detail::read_into(p, "kappa", c.params.kappa);
    detail::read_into(p, "q", c.params.q);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::read_into(g, "R", c.R);
    detail::read_into(g, "n", c.n);
  }
  if (j.contains("cutoff") && j.at("cutoff").contains("T")) {
    const auto& t = j.at("cutoff").at("T");
    if (t.is_number()) {
      c.cutoff_T = t.get<double>();
      if (!(*c.cutoff_T > 0.0)) throw std::invalid_argument("cutoff T must be positive");
    } else if (!(t.is_string() && t.get<std::string>() == "auto")) {
      throw std::invalid_argument("cutoff T must be a positive number or \"auto\"");
    }
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::read_into(s, "path_points", c.solver.path_points);
    detail::read_into(s, "path_tol", c.solver.path_tol);
    detail::read_into(s, "final_tol", c.solver.final_tol);
    detail::read_into(s, "max_iters", c.solver.max_iters);
    detail::read_into(s, "delta0", c.solver.delta0);
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (o.contains("directory")) c.out_dir = o.at("directory").get<std::string>();
    if (o.contains("formats")) {
      c.write_json = c.write_csv = false;
      for (const auto& f : o.at("formats")) {
        const std::string s = f.get<std::string>();
        if (s == "json")
          c.write_json = true;
        else if (s == "csv")
          c.write_csv = true;
        else
          throw std::invalid_argument("unknown output format: " + s);
      }
    }
  }

  c.params.validate();
  if (c.n < 16) throw std::invalid_argument("grid too coarse");
  if (!(c.R > 0.0)) throw std::invalid_argument("grid radius must be positive");
  if (c.solver.path_points < 4) throw std::invalid_argument("path_points must be >= 4");
  if (!(c.solver.path_tol > 0.0 && c.solver.final_tol > 0.0 && c.solver.delta0 > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (c.solver.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

/// Effective configuration with all defaults filled, suitable for re-running.
inline nlohmann::json effective_config(const RunConfig& c) {
  nlohmann::json j;
  j["params"] = {{"m", c.params.m},
                 {"omega", c.params.omega},
                 {"e", c.params.e},
                 {"kappa", c.params.kappa},
                 {"q", c.params.q}};
  j["grid"] = {{"R", c.R}, {"n", c.n}};
  if (c.cutoff_T)
    j["cutoff"] = {{"T", *c.cutoff_T}};
  else
    j["cutoff"] = {{"T", "auto"}};
  j["solver"] = {{"path_points", c.solver.path_points},
                 {"path_tol", c.solver.path_tol},
                 {"final_tol", c.solver.final_tol},
                 {"max_iters", c.solver.max_iters},
                 {"delta0", c.solver.delta0}};
  j["seed"] = c.seed;
  std::vector<std::string> formats;
  if (c.write_json) formats.push_back("json");
  if (c.write_csv) formats.push_back("csv");
  j["output"] = {{"directory", c.out_dir}, {"formats", formats}};
  return j;
}

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::json field_array(const ArrayXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace detail

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunConfig& cfg) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# config: " << effective_config(cfg).dump() << "\n";
  }

  void header(const std::vector<std::string>& cols) { line(cols); }

  void row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(detail::fmt(v));
    line(cells);
  }

  void line(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_profile_csv(const std::filesystem::path& path, const RunConfig& cfg,
                              const SolutionBundle& b) {
  CsvWriter w(path, cfg);
  w.header({"r", "u", "N", "h", "a0"});
  for (int i = 0; i < b.u.size(); ++i)
    w.row({b.u.grid->nodes()(i), b.u.v(i), b.n_field.v(i), b.h.v(i), b.a0.v(i)});
}

inline void write_solution_json(const std::filesystem::path& path, const RunConfig& cfg,
                                const SolutionBundle& b) {
  nlohmann::json j;
  j["config"] = effective_config(cfg);
  j["r"] = detail::field_array(b.u.grid->nodes());
  j["u"] = detail::field_array(b.u.v);
  j["n_field"] = detail::field_array(b.n_field.v);
  j["h"] = detail::field_array(b.h.v);
  j["a0"] = detail::field_array(b.a0.v);
  j["energy"] = {{"kinetic", b.energy.kinetic}, {"mass", b.energy.mass},
                 {"cs", b.energy.cs},           {"neutral", b.energy.neutral},
                 {"quartic", b.energy.quartic}, {"total", b.energy.total}};
  j["residual_u"] = b.residual_u;
  j["residual_n"] = b.residual_n;
  j["mp_level_estimate"] = b.mp_level_estimate;
  j["k_t_at_solution"] = b.k_t_at_solution;
  j["h1_norm"] = b.h1_norm;
  j["cutoff_T"] = b.cutoff_T;
  j["iterations"] = b.iterations;
  j["converged"] = b.converged;
  j["untruncated_solution"] = b.untruncated_solution;
  j["status"] = b.status;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_checks_csv(const std::filesystem::path& path, const RunConfig& cfg,
                             const std::vector<CheckResult>& checks) {
  CsvWriter w(path, cfg);
  w.header({"name", "passed", "measured", "bound_or_target", "tolerance", "statement"});
  for (const auto& c : checks)
    w.line({c.name, c.passed ? "1" : "0", detail::fmt(c.measured),
            detail::fmt(c.bound_or_target), detail::fmt(c.tolerance),
            "\"" + c.statement + "\""});
}

inline void write_checks_json(const std::filesystem::path& path, const RunConfig& cfg,
                              const std::vector<CheckResult>& checks) {
  nlohmann::json j;
  j["config"] = effective_config(cfg);
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"measured", c.measured},
                           {"bound_or_target", c.bound_or_target},
                           {"tolerance", c.tolerance},
                           {"statement", c.statement}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_sweep_csv(const std::filesystem::path& path, const RunConfig& cfg,
                            const std::vector<SweepRow>& rows) {
  CsvWriter w(path, cfg);
  w.header({"e", "converged", "h1_norm", "norm_over_T", "k_t", "energy", "residual_u",
            "residual_n", "iterations"});
  for (const auto& r : rows)
    w.line({detail::fmt(r.e), r.converged ? "1" : "0", detail::fmt(r.h1_norm),
            detail::fmt(r.norm_over_T), detail::fmt(r.k_t), detail::fmt(r.energy),
            detail::fmt(r.residual_u), detail::fmt(r.residual_n),
            std::to_string(r.iterations)});
}

inline void write_fiber_csv(const std::filesystem::path& path, const RunConfig& cfg,
                            const std::vector<FiberSample>& samples) {
  CsvWriter w(path, cfg);
  w.header({"t", "J", "t2_term", "t4_term", "t6_term"});
  for (const auto& s : samples)
    w.row({s.t, s.value, s.t * s.t * s.a2, s.t * s.t * s.t * s.t * s.a4, s.a6_t});
}

}  // namespace csh
