#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csh/io.hpp"
#include "csh/mountainpass.hpp"
#include "csh/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  bool seed_given = false;
  bool out_given = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "configuration file (JSON)")->required();
  cmd->add_option("--out", a.out_dir, "output directory (default ./out)");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_flag("--quiet", a.quiet, "suppress the summary line");
}

csh::RunConfig load_effective(const CommonArgs& a, CLI::App* cmd) {
  csh::RunConfig cfg = csh::load_config(a.config_path);
  if (cmd->count("--out")) cfg.out_dir = a.out_dir;
  if (cmd->count("--seed")) cfg.seed = a.seed;
  fs::create_directories(cfg.out_dir);
  return cfg;
}

int cmd_solve(const CommonArgs& a, CLI::App* cmd) {
  const csh::RunConfig cfg = load_effective(a, cmd);
  const csh::GridPtr grid = csh::RadialGrid::uniform(cfg.R, cfg.n);
  if (cfg.params.mu() < 0.5 && !a.quiet)
    std::cerr << "warning: kappa*q < 0.5; the neutral field decays slowly, "
                 "consider a larger grid radius\n";

  const csh::SolutionBundle b = csh::mp_solve(cfg.params, grid, cfg.cutoff_T, cfg.solver);

  if (cfg.write_json) csh::write_solution_json(fs::path(cfg.out_dir) / "solution.json", cfg, b);
  if (cfg.write_csv) csh::write_profile_csv(fs::path(cfg.out_dir) / "profile.csv", cfg, b);

  if (!a.quiet)
    std::cout << "solve: status=" << b.status << " energy=" << b.energy.total
              << " h1_norm=" << b.h1_norm << " k_t=" << b.k_t_at_solution
              << " residual_u=" << b.residual_u << " residual_n=" << b.residual_n
              << " iterations=" << b.iterations << "\n";
  return b.converged ? 0 : 2;
}

int cmd_verify(const CommonArgs& a, CLI::App* cmd, int trials) {
  const csh::RunConfig cfg = load_effective(a, cmd);
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const csh::GridPtr grid = csh::RadialGrid::uniform(cfg.R, cfg.n);

  const std::vector<csh::CheckResult> checks =
      csh::run_lemma_suite(cfg.params, trials, cfg.seed, grid);

  if (cfg.write_csv) csh::write_checks_csv(fs::path(cfg.out_dir) / "checks.csv", cfg, checks);
  if (cfg.write_json) csh::write_checks_json(fs::path(cfg.out_dir) / "checks.json", cfg, checks);

  int failed = 0;
  for (const auto& c : checks)
    if (!c.passed) {
      ++failed;
      std::cerr << "FAILED " << c.name << ": measured=" << c.measured
                << " tolerance=" << c.tolerance << " (" << c.statement << ")\n";
    }
  if (!a.quiet)
    std::cout << "verify: " << (checks.size() - failed) << "/" << checks.size()
              << " checks passed\n";
  return failed == 0 ? 0 : 3;
}

int cmd_sweep(const CommonArgs& a, CLI::App* cmd, const std::string& param, double from,
              double to, int steps) {
  const csh::RunConfig cfg = load_effective(a, cmd);
  if (param != "e") throw std::invalid_argument("only --param e is supported");
  if (!(from > 0.0 && to > from)) throw std::invalid_argument("need 0 < --from < --to");
  if (steps < 2) throw std::invalid_argument("--steps must be >= 2");
  const csh::GridPtr grid = csh::RadialGrid::uniform(cfg.R, cfg.n);

  std::vector<double> evals(steps);
  const double ratio = std::pow(to / from, 1.0 / (steps - 1));
  for (int i = 0; i < steps; ++i) evals[i] = from * std::pow(ratio, i);
  evals.back() = to;

  const std::vector<csh::SweepRow> rows =
      csh::sweep_coupling(cfg.params, evals, grid, cfg.cutoff_T, cfg.solver);
  csh::write_sweep_csv(fs::path(cfg.out_dir) / "sweep.csv", cfg, rows);

  int converged = 0;
  for (const auto& r : rows) converged += r.converged ? 1 : 0;
  if (!a.quiet)
    std::cout << "sweep: " << converged << "/" << rows.size() << " rows converged\n";
  return converged > 0 ? 0 : 2;
}

int cmd_fiber(const CommonArgs& a, CLI::App* cmd, double tmax, int samples) {
  const csh::RunConfig cfg = load_effective(a, cmd);
  if (!(tmax > 0.0)) throw std::invalid_argument("--tmax must be positive");
  if (samples < 8) throw std::invalid_argument("--samples must be >= 8");
  const csh::GridPtr grid = csh::RadialGrid::uniform(cfg.R, cfg.n);

  const csh::RadialField u = csh::find_negative_direction(cfg.params, grid);
  csh::CutoffSpec cut{1.0};
  if (cfg.cutoff_T) {
    cut.T = *cfg.cutoff_T;
  } else {
    cut = csh::resolve_auto_cutoff(u, cfg.params).second;
  }

  std::vector<double> ts(samples);
  for (int i = 0; i < samples; ++i) ts[i] = tmax * i / (samples - 1);
  const std::vector<csh::FiberSample> rows = csh::fiber_map(u, cfg.params, cut, ts);
  csh::write_fiber_csv(fs::path(cfg.out_dir) / "fiber.csv", cfg, rows);

  if (!a.quiet)
    std::cout << "fiber: " << samples << " samples, T=" << cut.T
              << ", J(tmax)=" << rows.back().value << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial solver and verification suite for a nonlocal "
               "Chern-Simons-Higgs system"};
  app.require_subcommand(1);

  CommonArgs solve_args, verify_args, sweep_args, fiber_args;
  int trials = 100;
  std::string sweep_param = "e";
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 0;
  double fiber_tmax = 0.0;
  int fiber_samples = 64;

  CLI::App* solve = app.add_subcommand("solve", "compute a mountain-pass solution");
  add_common(solve, solve_args);

  CLI::App* verify = app.add_subcommand("verify", "run the randomized property suite");
  add_common(verify, verify_args);
  verify->add_option("--trials", trials, "number of random trial fields (default 100)");

  CLI::App* sweep = app.add_subcommand("sweep", "solve across a range of coupling values");
  add_common(sweep, sweep_args);
  sweep->add_option("--param", sweep_param, "swept parameter (only e)");
  sweep->add_option("--from", sweep_from, "smallest value")->required();
  sweep->add_option("--to", sweep_to, "largest value")->required();
  sweep->add_option("--steps", sweep_steps, "number of geometric steps")->required();

  CLI::App* fiber = app.add_subcommand("fiber", "tabulate the fibering map t -> J(t u)");
  add_common(fiber, fiber_args);
  fiber->add_option("--tmax", fiber_tmax, "largest scaling factor")->required();
  fiber->add_option("--samples", fiber_samples, "number of samples (default 64)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args, solve);
    if (verify->parsed()) return cmd_verify(verify_args, verify, trials);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep, sweep_param, sweep_from,
                                          sweep_to, sweep_steps);
    if (fiber->parsed()) return cmd_fiber(fiber_args, fiber, fiber_tmax, fiber_samples);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
