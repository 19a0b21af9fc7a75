#pragma once

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "csh/bessel.hpp"
#include "csh/grid.hpp"
#include "csh/params.hpp"

namespace csh {

enum class NeutralMethod { finite_difference, green_oracle };

struct NeutralSolveReport {
  RadialField n_field;
  double coupling = 0.0;    // int N_u u^2 dx  (<= 0)
  double energy_lhs = 0.0;  // |grad N|_2^2 + kappa^2 q^2 |N|_2^2
  NeutralMethod method = NeutralMethod::finite_difference;
};

namespace detail {

// Tridiagonal solve (Thomas algorithm). diag/rhs are overwritten.
inline ArrayXd thomas_solve(ArrayXd diag, const ArrayXd& lower, const ArrayXd& upper,
                            ArrayXd rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    if (diag(i - 1) == 0.0) throw std::runtime_error("neutral solve failed");
    const double f = lower(i - 1) / diag(i - 1);
    diag(i) -= f * upper(i - 1);
    rhs(i) -= f * rhs(i - 1);
  }
  if (diag(n - 1) == 0.0) throw std::runtime_error("neutral solve failed");
  ArrayXd x(n);
  x(n - 1) = rhs(n - 1) / diag(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
  return x;
}

inline void neutral_identities(const RadialField& u, const PhysicalParams& p,
                               NeutralSolveReport& rep) {
  const auto& g = *u.grid;
  const ArrayXd& N = rep.n_field.v;
  const ArrayXd KN = stiffness_apply(g, N);
  rep.energy_lhs =
      two_pi * ((N * KN).sum() + p.mu() * p.mu() * (g.mass() * N.square()).sum());
  rep.coupling = two_pi * (g.mass() * N * u.v.square()).sum();
}

}  // namespace detail

/// Solves -Delta N + (kappa q)^2 N + q (1 + kappa q / 2m) u^2 = 0 on the
/// radial grid: symmetric three-point scheme, regularized Laplacian
/// 4(N1 - N0)/h^2 at the origin, N(R) = 0, one tridiagonal solve.
///
/// The scheme is the stationarity system of the discrete quadratic energy
/// (P1 stiffness + lumped mass), so the reported energy identity holds to
/// machine precision and the reduced functional's variation needs no
/// derivative of the map u -> N_u.
inline NeutralSolveReport solve_neutral_fd(const RadialField& u, const PhysicalParams& p) {
  p.validate();
  require_finite(u);
  const auto& g = *u.grid;
  const int n = g.n();
  const double h = g.h();
  const double mu2 = p.mu() * p.mu();
  const double qc = p.q * p.coupling_c();

  ArrayXd diag(n), lower(n - 1), upper(n - 1), rhs(n);
  for (int i = 0; i < n - 1; ++i) {
    const double rm = g.nodes()(i) + 0.5 * h;
    lower(i) = upper(i) = -rm / h;
  }
  diag(0) = (g.nodes()(0) + 0.5 * h) / h;
  for (int i = 1; i < n - 1; ++i)
    diag(i) = (g.nodes()(i) - 0.5 * h) / h + (g.nodes()(i) + 0.5 * h) / h;
  diag(n - 1) = 1.0;
  diag.head(n - 1) += mu2 * g.mass().head(n - 1);
  rhs.head(n - 1) = -qc * g.mass().head(n - 1) * u.v.head(n - 1).square();
  // Dirichlet edge row
  upper(n - 2) = 0.0;
  lower(n - 2) = 0.0;
  rhs(n - 1) = 0.0;

  NeutralSolveReport rep;
  rep.method = NeutralMethod::finite_difference;
  rep.n_field = {u.grid, detail::thomas_solve(diag, lower, upper, rhs)};
  detail::neutral_identities(u, p, rep);
  return rep;
}

/// Independent oracle: N(r) = -q(1+kq/2m) int_0^R I0(mu r<) K0(mu r>) s u(s)^2 ds.
/// O(n^2) on purpose; exists to cross-check the tridiagonal path.
inline NeutralSolveReport solve_neutral_green(const RadialField& u, const PhysicalParams& p) {
  p.validate();
  require_finite(u);
  const auto& g = *u.grid;
  const int n = g.n();
  const double mu = p.mu();
  const double qc = p.q * p.coupling_c();

  ArrayXd i0v(n), k0v(n);
  for (int i = 0; i < n; ++i) {
    i0v(i) = bessel_i0(mu * g.nodes()(i));
    k0v(i) = i == 0 ? 0.0 : bessel_k0(mu * g.nodes()(i));  // paired with zero source weight
  }
  const ArrayXd src = g.weights() * g.nodes() * u.v.square();

  ArrayXd N(n);
  for (int i = 0; i < n; ++i) {
    double inner = 0.0, outer = 0.0;
    for (int j = 0; j <= i; ++j) inner += i0v(j) * src(j);
    for (int j = i + 1; j < n; ++j) outer += k0v(j) * src(j);
    N(i) = -qc * (k0v(i) * inner + i0v(i) * outer);
  }

  NeutralSolveReport rep;
  rep.method = NeutralMethod::green_oracle;
  rep.n_field = {u.grid, std::move(N)};
  detail::neutral_identities(u, p, rep);
  return rep;
}

/// |int N_u u^2| <= (1/kappa^2 q)(1 + kappa q/2m) |u|_4^4, returned as
/// (lhs, rhs, holds).
inline std::tuple<double, double, bool> neutral_coupling_inequality(const RadialField& u,
                                                                    const PhysicalParams& p) {
  const NeutralSolveReport rep = solve_neutral_fd(u, p);
  const double lhs = -rep.coupling;
  const double rhs = p.coupling_c() / (p.kappa * p.kappa * p.q) * l4_norm_4(u);
  return {lhs, rhs, lhs <= rhs * (1.0 + 1e-8) + 1e-300};
}

}  // namespace csh
