#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "csh/functional.hpp"
#include "csh/grid.hpp"
#include "csh/neutral.hpp"
#include "csh/nonlocal.hpp"
#include "csh/params.hpp"
#include "csh/residual.hpp"

namespace csh {

struct SolverConfig {
  int path_points = 64;
  double path_tol = 1e-3;
  double final_tol = 1e-8;
  int max_iters = 20000;
  double delta0 = 0.1;
};

/// Discretized mountain-pass path: gamma_0 = 0, gamma_{k-1} = negative-energy
/// endpoint.
struct PathState {
  std::vector<RadialField> points;
  std::vector<double> energies;
  int argmax_index = 0;
};

struct SolutionBundle {
  RadialField u;
  RadialField n_field;
  RadialField h;
  RadialField a0;
  EnergyBreakdown energy;
  double residual_u = 0.0;
  double residual_n = 0.0;
  double mp_level_estimate = 0.0;
  double k_t_at_solution = 0.0;
  double h1_norm = 0.0;
  double cutoff_T = 0.0;
  int iterations = 0;
  bool converged = false;
  bool untruncated_solution = false;  // requires k_t_at_solution == 1
  std::string status;
};

namespace detail {

// H1 inner product matching h1_norm_sq: stiffness part + trapezoid L2 part.
inline double h1_inner(const RadialField& a, const RadialField& b) {
  const auto& g = *a.grid;
  return two_pi * ((a.v * stiffness_apply(g, b.v)).sum() +
                   (g.weights() * g.nodes() * a.v * b.v).sum());
}

// Tridiagonal factorization of the invertible linear part
// (1/2m) K + omega M, used as a preconditioner for descent directions.
struct LinearPart {
  ArrayXd diag, off;

  LinearPart(const RadialGrid& g, const PhysicalParams& p) {
    const int n = g.n();
    const double h = g.h();
    diag.resize(n);
    off.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) off(i) = -(g.nodes()(i) + 0.5 * h) / h / (2.0 * p.m);
    diag(0) = (g.nodes()(0) + 0.5 * h) / h / (2.0 * p.m);
    for (int i = 1; i < n - 1; ++i)
      diag(i) = ((g.nodes()(i) - 0.5 * h) + (g.nodes()(i) + 0.5 * h)) / h / (2.0 * p.m);
    diag(n - 1) = (g.nodes()(n - 2) + 0.5 * h) / h / (2.0 * p.m);
    diag += p.omega * g.mass();
  }

  ArrayXd solve(ArrayXd rhs) const {
    ArrayXd d = diag;
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) {
      const double f = off(i - 1) / d(i - 1);
      d(i) -= f * off(i - 1);
      rhs(i) -= f * rhs(i - 1);
    }
    ArrayXd x(n);
    x(n - 1) = rhs(n - 1) / d(n - 1);
    for (int i = n - 2; i >= 0; --i) x(i) = (rhs(i) - off(i) * x(i + 1)) / d(i);
    return x;
  }
};

inline double interior_max(const ArrayXd& g) {
  const int n = static_cast<int>(g.size());
  double m = 0.0;
  for (int i = 1; i < n - 1; ++i) m = std::max(m, std::abs(g(i)));
  return m;
}

}  // namespace detail

/// Searches the Gaussian family lambda * exp(-r^2 / (2 sigma^2)) over a log
/// grid for a member whose quartic fibering coefficient is negative, i.e.
/// q/(4m^2) |u|_4^4 < (1 + kq/2m) int |N_u| u^2.
inline RadialField find_negative_direction(const PhysicalParams& p, const GridPtr& grid) {
  p.validate();
  for (int le = -4; le <= 6; ++le) {
    const double lambda = std::pow(2.0, le);
    for (int se = -4; se <= 6; ++se) {
      const double sigma = std::pow(2.0, se);
      RadialField u = RadialField::of(grid, [&](double r) {
        return lambda * std::exp(-r * r / (2.0 * sigma * sigma));
      });
      const NeutralSolveReport nrep = solve_neutral_fd(u, p);
      const double lhs = p.q / (4.0 * p.m * p.m) *
                         detail::mass_integral({grid, u.v.square().square()});
      const double rhs = -p.coupling_c() * nrep.coupling;  // = c * int |N_u| u^2
      if (lhs < rhs) return u;
    }
  }
  throw std::runtime_error("no negative direction found; enlarge search family");
}

/// Doubles t until J_{e,T}(t u_dir) < 0.
inline RadialField find_endpoint(const RadialField& u_dir, const PhysicalParams& p,
                                 const CutoffSpec& cut) {
  double t = 1.0;
  for (int k = 0; k <= 60; ++k) {
    RadialField cand{u_dir.grid, t * u_dir.v};
    if (energy(cand, p, &cut).total < 0.0) return cand;
    t *= 2.0;
  }
  throw std::runtime_error("endpoint search diverged");
}

/// Resolves the "auto" cutoff: doubles t, trying T = 10 |t u_dir|_{H1} at
/// each step, and keeps the first (endpoint, T) with negative energy.
inline std::pair<RadialField, CutoffSpec> resolve_auto_cutoff(const RadialField& u_dir,
                                                              const PhysicalParams& p) {
  const double base = std::sqrt(h1_norm_sq(u_dir));
  double t = 1.0;
  for (int k = 0; k <= 60; ++k) {
    CutoffSpec cut{10.0 * t * base};
    RadialField cand{u_dir.grid, t * u_dir.v};
    if (energy(cand, p, &cut).total < 0.0) return {std::move(cand), cut};
    t *= 2.0;
  }
  throw std::runtime_error("endpoint search diverged");
}

namespace detail {

// Maximum of the fibering map t -> J_{e,T}(t v) given its coefficients.
// On the chi plateau the map is cubic in tau = t^2 and the first stationary
// point is found in closed form; otherwise a sampled golden-section search
// covers the cutoff transition.
inline double fiber_argmax(double a2, double a4, double a6e, double h1, double T) {
  if (a2 <= 0.0 || a4 >= 0.0) return -1.0;  // no mountain geometry along this fiber
  auto value = [&](double tau) {
    return tau * a2 + tau * tau * a4 +
           chi(tau * h1 / (T * T)) * tau * tau * tau * a6e;
  };
  double tau_star = -1.0;
  const double disc = a4 * a4 - 3.0 * a2 * a6e;
  if (a6e > 0.0 && disc > 0.0) {
    const double tau_poly = (-a4 - std::sqrt(disc)) / (3.0 * a6e);
    if (tau_poly > 0.0 && tau_poly * h1 <= T * T) tau_star = tau_poly;  // on the plateau
  } else if (a6e == 0.0) {
    tau_star = -a2 / (2.0 * a4);
  }
  if (tau_star < 0.0) {
    // bracket numerically up to just past the chi support
    const double tau_hi = std::max(2.0 * T * T / h1 * 1.5, -a2 / a4 * 2.0);
    double best = 0.0, best_v = 0.0;
    const int ns = 400;
    for (int i = 1; i <= ns; ++i) {
      const double tau = tau_hi * i / ns;
      const double v = value(tau);
      if (v > best_v) {
        best_v = v;
        best = tau;
      }
    }
    if (best == 0.0) return -1.0;
    double lo = best * (1.0 - 2.0 / ns), hi = best * (1.0 + 2.0 / ns);
    constexpr double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * best; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = value(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = value(x1);
      }
    }
    tau_star = 0.5 * (lo + hi);
  }
  return std::sqrt(tau_star);
}

struct FiberCoeffs {
  double a2 = 0.0, a4 = 0.0, csr = 0.0, h1 = 0.0;
};

inline FiberCoeffs fiber_coeffs(const RadialField& v, const PhysicalParams& p) {
  FiberCoeffs c;
  c.a2 = grad_norm_sq(v) / (4.0 * p.m) +
         0.5 * p.omega * mass_integral({v.grid, v.v.square()});
  const NeutralSolveReport nrep = solve_neutral_fd(v, p);
  c.a4 = p.q / (16.0 * p.m * p.m) * mass_integral({v.grid, v.v.square().square()}) +
         0.25 * p.coupling_c() * nrep.coupling;
  c.csr = cs_energy_raw(v);
  c.h1 = h1_norm_sq(v);
  return c;
}

}  // namespace detail

/// Min-max solve: deform a discretized path from 0 to a negative-energy
/// endpoint until the path maximum localizes a critical level, then refine
/// the max node by preconditioned descent on the fiber-maximized direction.
inline SolutionBundle mp_solve(const PhysicalParams& p, const GridPtr& grid,
                               std::optional<double> cutoff_T, const SolverConfig& cfg) {
  p.validate();
  const RadialField u_dir = find_negative_direction(p, grid);

  RadialField ubar = RadialField::zero(grid);
  CutoffSpec cut{1.0};
  if (cutoff_T) {
    cut.T = *cutoff_T;
    ubar = find_endpoint(u_dir, p, cut);
  } else {
    auto [ub, c] = resolve_auto_cutoff(u_dir, p);
    ubar = std::move(ub);
    cut = c;
  }

  const detail::LinearPart lin(*grid, p);
  const int k = std::max(cfg.path_points, 4);

  PathState path;
  path.points.reserve(k);
  for (int j = 0; j < k; ++j)
    path.points.push_back({grid, (static_cast<double>(j) / (k - 1)) * ubar.v});
  path.energies.resize(k);
  for (int j = 0; j < k; ++j) path.energies[j] = energy(path.points[j], p, &cut).total;

  SolutionBundle out;
  out.cutoff_T = cut.T;
  out.status = "ok";

  int iterations = 0;
  int stagnant = 0;
  double prev_max = std::numeric_limits<double>::infinity();

  // The path phase only needs to localize the max node near the pass; the
  // fiber refinement below drives the residual, so the sweep budget is small.
  const int max_sweeps = std::min(cfg.max_iters, 300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    // argmax node, ties broken by lowest index
    int jmax = 1;
    for (int j = 1; j < k - 1; ++j)
      if (path.energies[j] > path.energies[jmax]) jmax = j;
    path.argmax_index = jmax;

    const NeutralSolveReport nrep = solve_neutral_fd(path.points[jmax], p);
    ArrayXd ell = detail::gradient_coeffs(path.points[jmax], p, &cut, nrep);
    const double gmax = detail::interior_max(ell / grid->mass());
    if (gmax < cfg.path_tol) break;  // max node localized, hand over to refinement

    // descent step on the max node with backtracking
    const ArrayXd dir = -lin.solve(ell);
    double delta = cfg.delta0;
    bool moved = false;
    for (int bt = 0; bt < 50; ++bt) {
      RadialField cand{grid, path.points[jmax].v + delta * dir};
      const double ec = energy(cand, p, &cut).total;
      if (ec < path.energies[jmax]) {
        path.points[jmax] = std::move(cand);
        path.energies[jmax] = ec;
        moved = true;
        break;
      }
      delta *= 0.5;
    }
    ++iterations;

    // re-spread the path by H1 arclength
    {
      std::vector<double> seg(k - 1), cum(k, 0.0);
      for (int j = 0; j + 1 < k; ++j) {
        RadialField d{grid, path.points[j + 1].v - path.points[j].v};
        seg[j] = std::sqrt(std::max(0.0, detail::h1_inner(d, d)));
        cum[j + 1] = cum[j] + seg[j];
      }
      std::vector<RadialField> np;
      np.reserve(k);
      np.push_back(path.points.front());
      int cell = 0;
      for (int j = 1; j < k - 1; ++j) {
        const double target = cum[k - 1] * j / (k - 1);
        while (cell + 1 < k - 1 && cum[cell + 1] < target) ++cell;
        const double t = seg[cell] > 0.0 ? (target - cum[cell]) / seg[cell] : 0.0;
        np.push_back({grid, (1.0 - t) * path.points[cell].v + t * path.points[cell + 1].v});
      }
      np.push_back(path.points.back());
      path.points = std::move(np);
      for (int j = 1; j < k - 1; ++j) path.energies[j] = energy(path.points[j], p, &cut).total;
    }

    const double cur_max = *std::max_element(path.energies.begin(), path.energies.end());
    if (prev_max - cur_max < 1e-14) {
      if (++stagnant >= 100 && !moved) {
        out.status = "stagnation";
        break;
      }
    } else {
      stagnant = 0;
    }
    prev_max = cur_max;
  }

  // refinement: minimize F(v) = J(t*(v) v) over unit directions v; taking
  // the fiber maximum first removes the unstable mode, so preconditioned
  // descent on the direction converges to the pass
  RadialField v = path.points[path.argmax_index];
  {
    const double nv = std::sqrt(h1_norm_sq(v));
    if (nv > 0.0) v.v /= nv;
  }

  struct Eval {
    double tstar = 0.0, level = 0.0, res = 0.0;
    RadialField u;
    ArrayXd ell;
  };
  auto evaluate = [&](const RadialField& dir) -> std::optional<Eval> {
    const detail::FiberCoeffs fc = detail::fiber_coeffs(dir, p);
    const double a6e = p.cs_prefactor() * fc.csr;
    const double tstar = detail::fiber_argmax(fc.a2, fc.a4, a6e, fc.h1, cut.T);
    if (tstar <= 0.0) return std::nullopt;
    Eval ev;
    ev.tstar = tstar;
    ev.u = RadialField{grid, tstar * dir.v};
    const NeutralSolveReport nrep = solve_neutral_fd(ev.u, p);
    ev.ell = detail::gradient_coeffs(ev.u, p, &cut, nrep);
    ev.res = detail::interior_max(ev.ell / grid->mass());
    const double tau = tstar * tstar;
    ev.level = tau * fc.a2 + tau * tau * fc.a4 +
               chi(tau * fc.h1 / (cut.T * cut.T)) * tau * tau * tau * a6e;
    return ev;
  };

  std::optional<Eval> cur = evaluate(v);
  bool refined = false;
  double delta = cfg.delta0;
  if (!cur) out.status = "stagnation";
  while (cur && !refined) {
    if (cur->res < cfg.final_tol) {
      refined = true;
      break;
    }
    if (iterations >= cfg.max_iters) break;
    ++iterations;

    RadialField df{grid, -lin.solve(cur->ell)};
    // project out the fiber direction; t* already maximizes along it
    const double proj = detail::h1_inner(df, v) / detail::h1_inner(v, v);
    df.v -= proj * v.v;

    // accept on level decrease, or on residual decrease once level changes
    // sink below evaluation roundoff
    delta = std::min(cfg.delta0, 4.0 * delta);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      RadialField vc{grid, v.v + (delta / cur->tstar) * df.v};
      const double nn = std::sqrt(h1_norm_sq(vc));
      if (nn > 0.0) vc.v /= nn;
      std::optional<Eval> cand = evaluate(vc);
      if (cand && (cand->level < cur->level - 1e-14 * (1.0 + std::abs(cur->level)) ||
                   cand->res < cur->res)) {
        v = std::move(vc);
        cur = std::move(cand);
        moved = true;
        break;
      }
      delta *= 0.5;
    }
    if (!moved) {
      out.status = "residual not met";
      break;
    }
  }

  RadialField u = cur ? cur->u : path.points[path.argmax_index];
  const double level = cur ? cur->level : energy(u, p, &cut).total;

  const NeutralSolveReport nfin = solve_neutral_fd(u, p);
  out.u = u;
  out.n_field = nfin.n_field;
  out.h = compute_h(u);
  out.a0 = compute_a0(u, p);
  out.energy = energy(u, p, &cut);
  auto [r1, r2] = residual_system(u, nfin.n_field, p);
  out.residual_u = r1;
  out.residual_n = r2;
  out.mp_level_estimate = level;
  out.k_t_at_solution = k_t(u, cut);
  out.h1_norm = std::sqrt(h1_norm_sq(u));
  out.iterations = iterations;
  out.converged = refined && r1 < cfg.final_tol && r2 < cfg.final_tol;
  out.untruncated_solution = out.converged && out.k_t_at_solution == 1.0;
  if (!out.converged && out.status == "ok") out.status = "residual not met";
  if (out.converged) out.status = "converged";
  return out;
}

struct SweepRow {
  double e = 0.0;
  bool converged = false;
  double h1_norm = 0.0;
  double norm_over_T = 0.0;
  double k_t = 0.0;
  double energy = 0.0;
  double residual_u = 0.0;
  double residual_n = 0.0;
  int iterations = 0;
  std::string status;
};

/// Runs mp_solve across coupling values; per-row failures are recorded and
/// the sweep continues.
inline std::vector<SweepRow> sweep_coupling(const PhysicalParams& p_base,
                                            const std::vector<double>& e_values,
                                            const GridPtr& grid, std::optional<double> cutoff_T,
                                            const SolverConfig& cfg) {
  std::vector<SweepRow> rows;
  rows.reserve(e_values.size());
  for (double e : e_values) {
    SweepRow row;
    row.e = e;
    try {
      PhysicalParams p = p_base;
      p.e = e;
      const SolutionBundle b = mp_solve(p, grid, cutoff_T, cfg);
      row.converged = b.converged;
      row.h1_norm = b.h1_norm;
      row.norm_over_T = b.h1_norm / b.cutoff_T;
      row.k_t = b.k_t_at_solution;
      row.energy = b.energy.total;
      row.residual_u = b.residual_u;
      row.residual_n = b.residual_n;
      row.iterations = b.iterations;
      row.status = b.status;
    } catch (const std::exception& ex) {
      row.converged = false;
      row.status = ex.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace csh
