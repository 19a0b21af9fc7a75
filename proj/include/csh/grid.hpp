#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "csh/params.hpp"

namespace csh {

using Eigen::ArrayXd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform radial mesh on [0, R] with trapezoid weights for line integrals
/// and a lumped radial mass for the planar measure 2*pi*r*dr.
///
/// The lumped mass differs from the trapezoid product w*r only at the
/// origin, where it carries the cell mass h^2/8 that makes the discrete
/// Laplacian row at r = 0 come out as the regularized 4*(f1 - f0)/h^2.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> uniform(double R, int n) {
    return std::shared_ptr<const RadialGrid>(new RadialGrid(R, n));
  }

  double R() const { return R_; }
  int n() const { return n_; }
  double h() const { return h_; }
  const ArrayXd& nodes() const { return r_; }
  const ArrayXd& weights() const { return w_; }
  const ArrayXd& mass() const { return m_; }

 private:
  RadialGrid(double R, int n) : R_(R), n_(n) {
    if (!(std::isfinite(R) && R > 0.0)) throw std::invalid_argument("grid radius must be positive");
    if (n < 16) throw std::invalid_argument("grid too coarse");
    h_ = R / (n - 1);
    r_ = ArrayXd::LinSpaced(n, 0.0, R);
    r_(0) = 0.0;  // exact
    w_ = ArrayXd::Constant(n, h_);
    w_(0) = w_(n - 1) = h_ / 2.0;
    m_ = w_ * r_;
    m_(0) = h_ * h_ / 8.0;
  }

  double R_;
  int n_;
  double h_;
  ArrayXd r_, w_, m_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// A radially symmetric real field sampled on a RadialGrid.
struct RadialField {
  GridPtr grid;
  ArrayXd v;

  RadialField() = default;
  RadialField(GridPtr g, ArrayXd values) : grid(std::move(g)), v(std::move(values)) {
    if (!grid) throw std::invalid_argument("field without grid");
    if (v.size() != grid->n()) throw std::invalid_argument("field length does not match grid");
  }

  static RadialField zero(const GridPtr& g) { return {g, ArrayXd::Zero(g->n())}; }

  template <typename F>
  static RadialField of(const GridPtr& g, F&& f) {
    ArrayXd v = g->nodes().unaryExpr([&](double r) { return static_cast<double>(f(r)); });
    return {g, std::move(v)};
  }

  int size() const { return static_cast<int>(v.size()); }
  bool finite() const { return v.allFinite(); }
};

inline void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("fields live on different grids");
}

inline void require_finite(const RadialField& f) {
  if (!f.finite()) throw std::invalid_argument("non-finite field");
}

/// Integral over the plane: 2*pi * int_0^R f(r) r dr by composite trapezoid.
/// The integrand value f(r)*r at r = 0 is zero regardless of f(0).
inline double planar_integral(const RadialField& f) {
  require_finite(f);
  const auto& g = *f.grid;
  return two_pi * (g.weights() * g.nodes() * f.v).sum();
}

/// Cumulative trapezoid of f(s) ds from 0 to each node.
inline ArrayXd cumulative_trapezoid(const RadialGrid& g, const ArrayXd& f) {
  const int n = g.n();
  const double h = g.h();
  ArrayXd out(n);
  out(0) = 0.0;
  double acc = 0.0;
  for (int i = 1; i < n; ++i) {
    acc += 0.5 * h * (f(i - 1) + f(i));
    out(i) = acc;
  }
  return out;
}

/// Reverse cumulative trapezoid: integral of f(s) ds from each node to R.
inline ArrayXd reverse_cumulative_trapezoid(const RadialGrid& g, const ArrayXd& f) {
  const int n = g.n();
  const double h = g.h();
  ArrayXd out(n);
  out(n - 1) = 0.0;
  double acc = 0.0;
  for (int i = n - 2; i >= 0; --i) {
    acc += 0.5 * h * (f(i) + f(i + 1));
    out(i) = acc;
  }
  return out;
}

/// Central differences at interior nodes, second-order one-sided at the ends.
inline RadialField radial_derivative(const RadialField& u) {
  require_finite(u);
  const auto& g = *u.grid;
  const int n = g.n();
  if (n < 3) throw std::invalid_argument("grid too coarse for derivative");
  const double h = g.h();
  ArrayXd d(n);
  d(0) = (-3.0 * u.v(0) + 4.0 * u.v(1) - u.v(2)) / (2.0 * h);
  for (int i = 1; i < n - 1; ++i) d(i) = (u.v(i + 1) - u.v(i - 1)) / (2.0 * h);
  d(n - 1) = (3.0 * u.v(n - 1) - 4.0 * u.v(n - 2) + u.v(n - 3)) / (2.0 * h);
  return {u.grid, std::move(d)};
}

inline double l2_norm_sq(const RadialField& u) {
  require_finite(u);
  return planar_integral({u.grid, u.v.square()});
}

inline double l4_norm_4(const RadialField& u) {
  require_finite(u);
  return planar_integral({u.grid, u.v.square().square()});
}

/// |grad u|_2^2 = 2*pi * sum over cells of r_{i+1/2} * ((u_{i+1}-u_i)/h)^2 * h.
/// The cell-midpoint form is the quadratic form of the radial P1 stiffness,
/// so the variation of the kinetic energy reproduces the three-point
/// Laplacian stencil exactly.
inline double grad_norm_sq(const RadialField& u) {
  require_finite(u);
  const auto& g = *u.grid;
  const int n = g.n();
  if (n < 3) throw std::invalid_argument("grid too coarse for derivative");
  const double h = g.h();
  double acc = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double du = u.v(i + 1) - u.v(i);
    acc += (g.nodes()(i) + 0.5 * h) * du * du / h;
  }
  return two_pi * acc;
}

inline double h1_norm_sq(const RadialField& u) { return grad_norm_sq(u) + l2_norm_sq(u); }

/// Action of the radial P1 stiffness K on a nodal vector:
/// (K f)_i = sum over cells touching i of r_{mid} * (f_i - f_other)/h.
/// grad_norm_sq(u) == 2*pi * u . K u.
inline ArrayXd stiffness_apply(const RadialGrid& g, const ArrayXd& f) {
  const int n = g.n();
  const double h = g.h();
  ArrayXd out = ArrayXd::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const double rm = g.nodes()(i) + 0.5 * h;
    const double flux = rm * (f(i + 1) - f(i)) / h;
    out(i) -= flux;
    out(i + 1) += flux;
  }
  return out;
}

/// Conservative radial Laplacian f'' + f'/r on the grid; at r = 0 the
/// symmetric limit gives 4*(f1 - f0)/h^2, at r = R a one-sided value is
/// substituted (only interior nodes are used by residual norms).
inline ArrayXd radial_laplacian(const RadialField& f) {
  const auto& g = *f.grid;
  const int n = g.n();
  if (n < 3) throw std::invalid_argument("grid too coarse for derivative");
  const double h = g.h();
  ArrayXd out(n);
  out(0) = 4.0 * (f.v(1) - f.v(0)) / (h * h);
  for (int i = 1; i < n - 1; ++i) {
    const double rp = g.nodes()(i) + 0.5 * h;
    const double rm = g.nodes()(i) - 0.5 * h;
    out(i) = (rp * (f.v(i + 1) - f.v(i)) - rm * (f.v(i) - f.v(i - 1))) / (h * h * g.nodes()(i));
  }
  out(n - 1) = (f.v(n - 1) - 2.0 * f.v(n - 2) + f.v(n - 3)) / (h * h) +
               (3.0 * f.v(n - 1) - 4.0 * f.v(n - 2) + f.v(n - 3)) / (2.0 * h * g.nodes()(n - 1));
  return out;
}

}  // namespace csh
