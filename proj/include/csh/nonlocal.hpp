#pragma once

#include <cassert>
#include <cmath>
#include <utility>

#include "csh/grid.hpp"
#include "csh/params.hpp"

namespace csh {

/// h_u(r) = int_0^r s u(s)^2 ds, the cumulative magnetic flux function.
inline RadialField compute_h(const RadialField& u) {
  require_finite(u);
  const auto& g = *u.grid;
  return {u.grid, cumulative_trapezoid(g, g.nodes() * u.v.square())};
}

namespace detail {
// int_r^R u(s)^2 h_u(s) / s ds with the integrand continued by its limit 0
// at s = 0; shared by the electric potential and the functional gradient.
inline ArrayXd a0_raw(const RadialField& u, const RadialField& h) {
  const auto& g = *u.grid;
  ArrayXd integrand(g.n());
  integrand(0) = 0.0;
  for (int i = 1; i < g.n(); ++i)
    integrand(i) = u.v(i) * u.v(i) * h.v(i) / g.nodes()(i);
  return reverse_cumulative_trapezoid(g, integrand);
}
}  // namespace detail

/// Electric potential A0(r), vanishing at the domain edge.
inline RadialField compute_a0(const RadialField& u, const PhysicalParams& p) {
  p.validate();
  const RadialField h = compute_h(u);
  return {u.grid, p.a0_prefactor() * detail::a0_raw(u, h)};
}

/// int u^2 h_u^2 / |x|^2 dx, without any physical prefactor.
/// The integrand times r vanishes at the origin like r^3.
inline double cs_energy_raw(const RadialField& u) {
  require_finite(u);
  const auto& g = *u.grid;
  const RadialField h = compute_h(u);
  double acc = 0.0;
  for (int i = 1; i < g.n(); ++i)
    acc += g.weights()(i) * u.v(i) * u.v(i) * h.v(i) * h.v(i) / g.nodes()(i);
  return two_pi * acc;
}

/// The three nonlocal gauge objects induced by u.
struct GaugeSnapshot {
  RadialField h;
  RadialField a0;
  double cs_energy_raw = 0.0;
};

inline GaugeSnapshot gauge_snapshot(const RadialField& u, const PhysicalParams& p) {
  GaugeSnapshot s{compute_h(u), compute_a0(u, p), cs_energy_raw(u)};
#ifndef NDEBUG
  for (int i = 1; i < u.grid->n(); ++i) {
    assert(s.h.v(i) + 1e-14 >= s.h.v(i - 1));
    assert(s.a0.v(i) <= s.a0.v(i - 1) + 1e-14);
  }
#endif
  return s;
}

/// Tangential gauge potential (A1, A2) at a planar point x != 0,
/// with h_u interpolated linearly between nodes.
inline std::pair<double, double> gauge_vector(const RadialField& u, const PhysicalParams& p,
                                              double x1, double x2) {
  const double rho2 = x1 * x1 + x2 * x2;
  if (rho2 == 0.0) throw std::invalid_argument("gauge vector undefined at origin");
  const RadialField h = compute_h(u);
  const auto& g = *u.grid;
  const double rho = std::sqrt(rho2);
  double hval;
  if (rho >= g.R()) {
    hval = h.v(g.n() - 1);
  } else {
    const int i = static_cast<int>(rho / g.h());
    const double t = (rho - g.nodes()(i)) / g.h();
    hval = (1.0 - t) * h.v(i) + t * h.v(i + 1);
  }
  const double s = p.e / p.kappa * hval / rho2;
  return {s * x2, -s * x1};
}

}  // namespace csh
