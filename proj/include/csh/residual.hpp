#pragma once

#include <cmath>
#include <utility>

#include "csh/grid.hpp"
#include "csh/nonlocal.hpp"
#include "csh/params.hpp"

namespace csh {

/// Max-norm residuals of the two field equations over interior nodes,
/// with the Laplacian in conservative radial form (identical to the
/// f'' + f'/r stencil) and the nonlocal terms from compute_h / compute_a0.
inline std::pair<double, double> residual_system(const RadialField& u, const RadialField& nf,
                                                 const PhysicalParams& p) {
  require_same_grid(u, nf);
  p.validate();
  const auto& g = *u.grid;
  const int n = g.n();

  const RadialField h = compute_h(u);
  const RadialField a0 = compute_a0(u, p);
  const ArrayXd lap_u = radial_laplacian(u);
  const ArrayXd lap_n = radial_laplacian(nf);

  const double cs_direct = std::pow(p.e, 4) / (2.0 * p.m * p.kappa * p.kappa);
  const double c = p.coupling_c();
  const double mu2 = p.mu() * p.mu();

  double r1 = 0.0, r2 = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double r = g.nodes()(i);
    const double hr = h.v(i) / r;
    const double eq1 = -lap_u(i) / (2.0 * p.m) + p.omega * u.v(i) +
                       cs_direct * hr * hr * u.v(i) + p.e * a0.v(i) * u.v(i) +
                       c * nf.v(i) * u.v(i) + p.q / (4.0 * p.m * p.m) * std::pow(u.v(i), 3);
    const double eq2 = -lap_n(i) + mu2 * nf.v(i) + p.q * c * u.v(i) * u.v(i);
    r1 = std::max(r1, std::abs(eq1));
    r2 = std::max(r2, std::abs(eq2));
  }
  return {r1, r2};
}

}  // namespace csh
