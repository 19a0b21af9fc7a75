#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csh/functional.hpp"

using namespace csh;
namespace {
const double pi = std::numbers::pi;

RadialField gaussian(const GridPtr& g) {
  return RadialField::of(g, [](double r) { return std::exp(-0.5 * r * r); });
}

RadialField random_smooth(const GridPtr& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), uc(0.0, 5.0), uw(0.3, 2.0);
  const double a1 = ua(rng), a2 = ua(rng), c1 = uc(rng), c2 = uc(rng), w1 = uw(rng), w2 = uw(rng);
  return RadialField::of(g, [=](double r) {
    return a1 * std::exp(-0.5 * std::pow((r - c1) / w1, 2)) +
           a2 * std::exp(-0.5 * std::pow((r - c2) / w2, 2));
  });
}

}  // namespace

TEST_CASE("cutoff plateau, transition, support") {
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(0.5) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(2.0) == 0.0);
  CHECK(chi(3.0) == 0.0);
  CHECK(chi(1.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chi_prime(0.5) == 0.0);
  CHECK(chi_prime(2.5) == 0.0);
  double mx = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double s = 3.0 * i / 10000.0;
    const double c = chi(s);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    mx = std::max(mx, std::abs(chi_prime(s)));
  }
  CHECK(mx <= 2.0 + 1e-12);
  CHECK(mx > 1.9);  // the bound is sharp; the extreme slope sits at s = 1.5

  // chi_prime is the derivative of chi
  for (double s : {1.1, 1.3, 1.5, 1.8, 1.95}) {
    const double fd = (chi(s + 1e-6) - chi(s - 1e-6)) / 2e-6;
    CHECK(chi_prime(s) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("truncation factor") {
  const GridPtr g = RadialGrid::uniform(20.0, 512);
  const RadialField u = gaussian(g);
  const double h1 = h1_norm_sq(u);
  CHECK(k_t(u, {std::sqrt(2.0 * h1)}) == 1.0);
  CHECK(k_t(u, {std::sqrt(h1 / 3.0)}) == 0.0);
  CHECK(k_t(u, {std::sqrt(h1 / 1.5)}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("energy breakdown closed forms") {
  const GridPtr g = RadialGrid::uniform(20.0, 8193);
  PhysicalParams p;
  p.e = 0.5;
  const RadialField u = gaussian(g);
  const EnergyBreakdown b = energy(u, p);
  CHECK(b.kinetic == doctest::Approx(pi / 4.0).epsilon(1e-5));
  CHECK(b.mass == doctest::Approx(pi / 2.0).epsilon(1e-5));
  CHECK(b.quartic == doctest::Approx(pi / 32.0).epsilon(1e-5));
  CHECK(b.cs == doctest::Approx(std::pow(0.5, 4) / 4.0 * (pi / 4.0) * std::log(4.0 / 3.0))
                    .epsilon(1e-5));
  // neutral term from the cross-validated coupling value of int N_u u^2
  CHECK(b.neutral == doctest::Approx(0.25 * 1.5 * -1.087278473599049).epsilon(1e-5));
  CHECK(b.total ==
        doctest::Approx(b.kinetic + b.mass + b.cs + b.neutral + b.quartic).epsilon(1e-12));
  CHECK(b.neutral <= 0.0);

  const EnergyBreakdown z = energy(RadialField::zero(g), p);
  CHECK(z.total == 0.0);
  CHECK(z.kinetic == 0.0);
  CHECK(z.cs == 0.0);
}

TEST_CASE("truncated energy matches on the plateau") {
  const GridPtr g = RadialGrid::uniform(20.0, 1024);
  PhysicalParams p;
  const RadialField u = random_smooth(g, 2);
  CutoffSpec big{10.0 * std::sqrt(h1_norm_sq(u))};
  CHECK(energy(u, p, &big).total == doctest::Approx(energy(u, p).total).epsilon(1e-12));
  const RadialField phi = random_smooth(g, 3);
  CHECK(first_variation(u, phi, p, &big) ==
        doctest::Approx(first_variation(u, phi, p)).epsilon(1e-12));
}

TEST_CASE("first variation against central differences") {
  const GridPtr g = RadialGrid::uniform(20.0, 1024);
  PhysicalParams p;
  p.e = 0.4;
  for (unsigned s = 0; s < 10; ++s) {
    const RadialField u = random_smooth(g, 50 + s);
    const RadialField phi = random_smooth(g, 150 + s);
    CHECK(first_variation(u, RadialField::zero(g), p) == 0.0);
    const double h1 = h1_norm_sq(u);
    CutoffSpec mid{std::sqrt(h1 / 1.4)};  // inside the transition band
    for (const CutoffSpec* c :
         {static_cast<const CutoffSpec*>(nullptr), static_cast<const CutoffSpec*>(&mid)}) {
      const double fv = first_variation(u, phi, p, c);
      const double eps = 1e-5;
      RadialField up{g, u.v + eps * phi.v}, um{g, u.v - eps * phi.v};
      const double fd = (energy(up, p, c).total - energy(um, p, c).total) / (2.0 * eps);
      CHECK(fv == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("value minus quarter variation identity") {
  const GridPtr g = RadialGrid::uniform(20.0, 1024);
  PhysicalParams p;
  p.e = 0.6;
  const RadialField u = random_smooth(g, 77);
  const double h1 = h1_norm_sq(u);
  CutoffSpec cut{std::sqrt(h1 / 1.6)};
  const double lhs = energy(u, p, &cut).total - 0.25 * first_variation(u, u, p, &cut);

  const double kt = k_t(u, cut);
  const double cp = chi_prime(h1 / (cut.T * cut.T));
  const double csr = cs_energy_raw(u);
  const double rhs = grad_norm_sq(u) / (8.0 * p.m) +
                     0.25 * p.omega * detail::mass_integral({g, u.v.square()}) -
                     0.5 * p.cs_prefactor() * kt * csr -
                     0.5 * p.cs_prefactor() / (cut.T * cut.T) * cp * h1 * csr;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("gradient field represents the variation in the lumped measure") {
  const GridPtr g = RadialGrid::uniform(20.0, 1024);
  PhysicalParams p;
  const RadialField u = random_smooth(g, 5);
  const RadialField gf = gradient_field(u, p);
  for (unsigned s = 0; s < 10; ++s) {
    const RadialField phi = random_smooth(g, 400 + s);
    const double paired = two_pi * (g->mass() * gf.v * phi.v).sum();
    CHECK(paired == doctest::Approx(first_variation(u, phi, p)).epsilon(1e-8));
  }
  CHECK(gradient_field(RadialField::zero(g), p).v.abs().maxCoeff() == 0.0);
}

TEST_CASE("fiber map decomposition") {
  const GridPtr g = RadialGrid::uniform(20.0, 1024);
  PhysicalParams p;
  p.e = 0.3;
  const RadialField u = random_smooth(g, 9);
  const double h1 = h1_norm_sq(u);
  CutoffSpec cut{2.0 * std::sqrt(h1)};

  const auto samples = fiber_map(u, p, cut, {0.0, 0.5, 1.0, 2.0, 4.0});
  CHECK(samples[0].value == 0.0);
  for (const auto& s : samples) {
    RadialField tu{g, s.t * u.v};
    const double direct = energy(tu, p, &cut).total;
    CHECK(s.value == doctest::Approx(direct).epsilon(1e-8));
    if (s.t * s.t * h1 >= 2.0 * cut.T * cut.T) CHECK(s.a6_t == 0.0);
  }
  CHECK(samples[4].a6_t == 0.0);  // t = 4: 16 h1 > 2 * (4 h1)
}

TEST_CASE("positive lower bound on the small sphere") {
  const GridPtr g = RadialGrid::uniform(20.0, 512);
  PhysicalParams p;  // defaults: e = 0.05
  CutoffSpec cut{10.0};
  double worst = std::numeric_limits<double>::infinity();
  for (unsigned s = 0; s < 50; ++s) {
    RadialField u = random_smooth(g, 600 + s);
    const double nrm = std::sqrt(h1_norm_sq(u));
    if (nrm == 0.0) continue;
    u.v *= 0.1 / nrm;
    worst = std::min(worst, energy(u, p, &cut).total);
  }
  CHECK(worst > 0.0);
}
