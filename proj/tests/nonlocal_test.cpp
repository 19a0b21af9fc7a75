#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csh/nonlocal.hpp"

using namespace csh;
namespace {
const double pi = std::numbers::pi;

RadialField gaussian(const GridPtr& g) {
  return RadialField::of(g, [](double r) { return std::exp(-0.5 * r * r); });
}
}  // namespace

TEST_CASE("flux function closed form") {
  const GridPtr g = RadialGrid::uniform(12.0, 64001);
  const RadialField h = compute_h(gaussian(g));
  CHECK(h.v(0) == 0.0);
  for (int i = 0; i < g->n(); i += 503) {
    const double r = g->nodes()(i);
    const double exact = 0.5 * (1.0 - std::exp(-r * r));
    CHECK(std::abs(h.v(i) - exact) < 1e-8);
  }
  // the same quadrature rule computes the l2 norm, so the endpoint matches it
  CHECK(two_pi * h.v(g->n() - 1) == doctest::Approx(l2_norm_sq(gaussian(g))).epsilon(1e-10));
  CHECK(compute_h(RadialField::zero(g)).v.abs().maxCoeff() == 0.0);
}

TEST_CASE("flux endpoint consistency on a random field") {
  const GridPtr g = RadialGrid::uniform(20.0, 2048);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const RadialField u =
      RadialField::of(g, [&](double r) { return dist(rng) * std::exp(-0.2 * r); });
  const RadialField h = compute_h(u);
  CHECK(two_pi * h.v(g->n() - 1) == doctest::Approx(l2_norm_sq(u)).epsilon(1e-10));
  for (int i = 1; i < g->n(); ++i) CHECK(h.v(i) >= h.v(i - 1) - 1e-15);
}

TEST_CASE("electric potential closed form at the origin") {
  const GridPtr g = RadialGrid::uniform(12.0, 64001);
  PhysicalParams p;
  p.e = 0.7;
  const RadialField a0 = compute_a0(gaussian(g), p);
  const double exact = p.a0_prefactor() * std::log(2.0) / 4.0;
  CHECK(a0.v(0) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(a0.v(g->n() - 1) == 0.0);
  for (int i = 1; i < g->n(); ++i) CHECK(a0.v(i) <= a0.v(i - 1) + 1e-15);
  CHECK(compute_a0(RadialField::zero(g), p).v.abs().maxCoeff() == 0.0);
}

TEST_CASE("electric potential of a compactly supported field vanishes outside") {
  const GridPtr g = RadialGrid::uniform(10.0, 4001);
  PhysicalParams p;
  const RadialField u = RadialField::of(g, [](double r) {
    return r < 1.0 ? std::pow(1.0 - r * r, 3) : 0.0;  // support in [0,1]
  });
  const RadialField a0 = compute_a0(u, p);
  for (int i = 0; i < g->n(); ++i)
    if (g->nodes()(i) >= 1.0) CHECK(a0.v(i) == 0.0);
  CHECK(a0.v(0) > 0.0);
}

TEST_CASE("electric potential derivative relation") {
  const GridPtr g = RadialGrid::uniform(12.0, 8001);
  PhysicalParams p;
  p.e = 0.5;
  const RadialField u = gaussian(g);
  const RadialField h = compute_h(u);
  const RadialField a0 = compute_a0(u, p);
  const RadialField da0 = radial_derivative(a0);
  for (int i = 1; i < g->n() - 1; i += 211) {
    const double r = g->nodes()(i);
    const double expected = -p.a0_prefactor() * u.v(i) * u.v(i) * h.v(i) / r;
    CHECK(da0.v(i) == doctest::Approx(expected).epsilon(1e-4).scale(1e-8));
  }
}

TEST_CASE("chern-simons integral closed form and scaling") {
  const GridPtr g = RadialGrid::uniform(12.0, 64001);
  const RadialField u = gaussian(g);
  const double exact = (pi / 4.0) * std::log(4.0 / 3.0);
  CHECK(cs_energy_raw(u) == doctest::Approx(exact).epsilon(1e-6));
  CHECK(cs_energy_raw(RadialField::zero(g)) == 0.0);

  const GridPtr gc = RadialGrid::uniform(20.0, 2048);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const RadialField w =
      RadialField::of(gc, [&](double r) { return dist(rng) * std::exp(-0.1 * r * r); });
  RadialField w2{gc, 2.0 * w.v};
  CHECK(cs_energy_raw(w2) == doctest::Approx(64.0 * cs_energy_raw(w)).epsilon(1e-10));
}

TEST_CASE("boundedness witness is stable under refinement") {
  double prev = 0.0;
  for (int n : {1024, 2048, 4096}) {
    const GridPtr g = RadialGrid::uniform(20.0, n);
    const RadialField u = gaussian(g);
    const double ratio = cs_energy_raw(u) / std::pow(h1_norm_sq(u), 3);
    CHECK(std::isfinite(ratio));
    if (prev != 0.0) CHECK(ratio == doctest::Approx(prev).epsilon(1e-3));
    prev = ratio;
  }
}

TEST_CASE("gauge vector is tangential") {
  const GridPtr g = RadialGrid::uniform(10.0, 2001);
  PhysicalParams p;
  p.e = 0.3;
  p.kappa = 2.0;
  const RadialField u = gaussian(g);
  const RadialField h = compute_h(u);

  auto [a1, a2] = gauge_vector(u, p, 1.0, 0.0);
  CHECK(a1 == 0.0);
  CHECK(a2 == doctest::Approx(-(p.e / p.kappa) * h.v(200)).epsilon(1e-8));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int k = 0; k < 20; ++k) {
    const double x1 = dist(rng), x2 = dist(rng);
    if (x1 == 0.0 && x2 == 0.0) continue;
    auto [b1, b2] = gauge_vector(u, p, x1, x2);
    CHECK(std::abs(x1 * b1 + x2 * b2) < 1e-12);
  }
  auto [z1, z2] = gauge_vector(RadialField::zero(g), p, 1.0, 1.0);
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);
  CHECK_THROWS_WITH(gauge_vector(u, p, 0.0, 0.0), "gauge vector undefined at origin");
}
