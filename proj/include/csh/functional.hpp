#pragma once

#include <cmath>
#include <vector>

#include "csh/grid.hpp"
#include "csh/neutral.hpp"
#include "csh/nonlocal.hpp"
#include "csh/params.hpp"

namespace csh {

/// Smooth cutoff: 1 on [0,1], 0 on [2,inf), exponential partition of unity
/// on the transition. The slope attains its extreme value -2 at s = 3/2.
inline double chi(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - s));
  const double b = std::exp(-1.0 / (s - 1.0));
  return a / (a + b);
}

inline double chi_prime(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double ta = 2.0 - s, tb = s - 1.0;
  const double a = std::exp(-1.0 / ta), b = std::exp(-1.0 / tb);
  const double da = -a / (ta * ta), db = b / (tb * tb);  // d/ds of a and b
  const double denom = (a + b) * (a + b);
  return (da * b - a * db) / denom;
}

/// Truncation level for the Chern-Simons term, in H1-norm units.
struct CutoffSpec {
  double T = 1.0;
};

/// K_T(u) = chi(|u|_{H1}^2 / T^2).
inline double k_t(const RadialField& u, const CutoffSpec& c) {
  return chi(h1_norm_sq(u) / (c.T * c.T));
}

struct EnergyBreakdown {
  double kinetic = 0.0;  // 1/(4m) |grad u|_2^2
  double mass = 0.0;     // omega/2 |u|_2^2
  double cs = 0.0;       // e^4/(4 m kappa^2) [K_T] int u^2 h^2 / |x|^2
  double neutral = 0.0;  // 1/4 (1 + kq/2m) int N_u u^2   (<= 0)
  double quartic = 0.0;  // q/(16 m^2) |u|_4^4
  double total = 0.0;
};

namespace detail {

// Lumped-mass planar integral; equals planar_integral except for the
// origin cell, whose weight h^2/8 keeps the energy variation aligned with
// the regularized Laplacian row at r = 0.
inline double mass_integral(const RadialField& f) {
  return two_pi * (f.grid->mass() * f.v).sum();
}

}  // namespace detail

/// Reduced one-field energy; with a cutoff present the Chern-Simons term
/// carries the factor K_T(u).
inline EnergyBreakdown energy(const RadialField& u, const PhysicalParams& p,
                              const CutoffSpec* cut = nullptr) {
  p.validate();
  require_finite(u);
  EnergyBreakdown b;
  b.kinetic = grad_norm_sq(u) / (4.0 * p.m);
  b.mass = 0.5 * p.omega * detail::mass_integral({u.grid, u.v.square()});
  b.quartic = p.q / (16.0 * p.m * p.m) * detail::mass_integral({u.grid, u.v.square().square()});
  const NeutralSolveReport nrep = solve_neutral_fd(u, p);
  b.neutral = 0.25 * p.coupling_c() * nrep.coupling;
  const double kt = cut ? k_t(u, *cut) : 1.0;
  b.cs = p.cs_prefactor() * kt * cs_energy_raw(u);
  b.total = b.kinetic + b.mass + b.cs + b.neutral + b.quartic;
  return b;
}

namespace detail {

// Coefficient vector l of the first variation: J'(u)[phi] = 2*pi * l . phi.
// Exact derivative of the discrete energy above; the neutral term needs no
// differentiation of N_u because the tridiagonal solve is the stationarity
// system of the same discrete quadratic.
inline ArrayXd gradient_coeffs(const RadialField& u, const PhysicalParams& p,
                               const CutoffSpec* cut, const NeutralSolveReport& nrep) {
  const auto& g = *u.grid;
  const int n = g.n();
  const ArrayXd Ku = stiffness_apply(g, u.v);
  const RadialField h = compute_h(u);

  ArrayXd ell = Ku / (2.0 * p.m) +
                g.mass() * (p.omega * u.v + p.q / (4.0 * p.m * p.m) * u.v.cube() +
                            p.coupling_c() * nrep.n_field.v * u.v);

  const double kt = cut ? k_t(u, *cut) : 1.0;
  if (kt != 0.0) {
    // direct Chern-Simons term: e^4/(2 m k^2) u h^2 / r^2
    const double c_direct = kt * std::pow(p.e, 4) / (2.0 * p.m * p.kappa * p.kappa);
    for (int i = 1; i < n; ++i)
      ell(i) += c_direct * g.weights()(i) * u.v(i) * h.v(i) * h.v(i) / g.nodes()(i);
    // inner nonlocal term, Fubini-rearranged onto the electric-potential tail
    const ArrayXd rc = a0_raw(u, h);
    const double c_inner = kt * std::pow(p.e, 4) / (p.m * p.kappa * p.kappa);
    ell += c_inner * g.weights() * g.nodes() * u.v * rc;
  }
  if (cut) {
    const double s = h1_norm_sq(u) / (cut->T * cut->T);
    const double cp = chi_prime(s);
    if (cp != 0.0) {
      const double factor =
          2.0 * cp / (cut->T * cut->T) * p.cs_prefactor() * cs_energy_raw(u);
      ell += factor * (Ku + g.weights() * g.nodes() * u.v);
    }
  }
  return ell;
}

}  // namespace detail

/// Weak-form pairing J'(u)[phi] (or J'_{e,T} when a cutoff is given).
inline double first_variation(const RadialField& u, const RadialField& phi,
                              const PhysicalParams& p, const CutoffSpec* cut = nullptr) {
  require_same_grid(u, phi);
  require_finite(phi);
  const NeutralSolveReport nrep = solve_neutral_fd(u, p);
  return two_pi * (detail::gradient_coeffs(u, p, cut, nrep) * phi.v).sum();
}

/// Pointwise representative g of the first variation with respect to the
/// lumped planar measure: J'(u)[phi] = 2*pi * sum_i m_i g_i phi_i exactly.
/// At interior nodes g coincides with the strong-form left side of the
/// field equation, so max|g| doubles as the PDE residual.
inline RadialField gradient_field(const RadialField& u, const PhysicalParams& p,
                                  const CutoffSpec* cut = nullptr) {
  const NeutralSolveReport nrep = solve_neutral_fd(u, p);
  ArrayXd ell = detail::gradient_coeffs(u, p, cut, nrep);
  return {u.grid, ell / u.grid->mass()};
}

struct FiberSample {
  double t = 0.0;
  double value = 0.0;  // J_{e,T}(t u)
  double a2 = 0.0;     // coefficient of t^2
  double a4 = 0.0;     // coefficient of t^4
  double a6_t = 0.0;   // full t^6 contribution including K_T(tu)
};

/// Fibering map t -> J_{e,T}(t u) from one neutral solve, using the exact
/// quadratic scaling N_{tu} = t^2 N_u.
inline std::vector<FiberSample> fiber_map(const RadialField& u, const PhysicalParams& p,
                                          const CutoffSpec& cut,
                                          const std::vector<double>& t_samples) {
  p.validate();
  require_finite(u);
  const double a2 = grad_norm_sq(u) / (4.0 * p.m) +
                    0.5 * p.omega * detail::mass_integral({u.grid, u.v.square()});
  const NeutralSolveReport nrep = solve_neutral_fd(u, p);
  const double a4 =
      p.q / (16.0 * p.m * p.m) * detail::mass_integral({u.grid, u.v.square().square()}) +
      0.25 * p.coupling_c() * nrep.coupling;
  const double csr = cs_energy_raw(u);
  const double h1 = h1_norm_sq(u);

  std::vector<FiberSample> out;
  out.reserve(t_samples.size());
  for (double t : t_samples) {
    FiberSample s;
    s.t = t;
    s.a2 = a2;
    s.a4 = a4;
    const double t2 = t * t;
    const double kt = chi(t2 * h1 / (cut.T * cut.T));
    s.a6_t = p.cs_prefactor() * kt * t2 * t2 * t2 * csr;
    s.value = t2 * a2 + t2 * t2 * a4 + s.a6_t;
    out.push_back(s);
  }
  return out;
}

}  // namespace csh
