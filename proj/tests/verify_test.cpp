#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csh/verify.hpp"

using namespace csh;

TEST_CASE("suite rejects a nonpositive trial count") {
  PhysicalParams p;
  const GridPtr g = RadialGrid::uniform(20.0, 256);
  CHECK_THROWS_WITH(run_lemma_suite(p, 0, 1, g), "trials must be >= 1");
}

TEST_CASE("degenerate single trial passes trivially") {
  PhysicalParams p;
  const GridPtr g = RadialGrid::uniform(20.0, 256);
  const auto checks = run_lemma_suite(p, 1, 1, g);
  for (const auto& c : checks) {
    INFO(c.name, " measured=", c.measured);
    CHECK(c.passed);
  }
}

TEST_CASE("randomized trials pass and are seed-deterministic") {
  PhysicalParams p;
  const GridPtr g = RadialGrid::uniform(20.0, 256);
  const auto a = run_lemma_suite(p, 5, 42, g);
  const auto b = run_lemma_suite(p, 5, 42, g);
  REQUIRE(a.size() == b.size());
  bool any_nonzero = false;
  for (size_t i = 0; i < a.size(); ++i) {
    INFO(a[i].name, " measured=", a[i].measured);
    CHECK(a[i].passed);
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].measured == b[i].measured);  // bitwise reproducible
    any_nonzero = any_nonzero || a[i].measured != 0.0;
  }
  CHECK(any_nonzero);

  const auto c = run_lemma_suite(p, 5, 43, g);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs = differs || a[i].measured != c[i].measured;
  CHECK(differs);
}

TEST_CASE("summary rows aggregate the trial checks") {
  PhysicalParams p;
  const GridPtr g = RadialGrid::uniform(20.0, 256);
  const auto checks = run_lemma_suite(p, 3, 7, g);
  int summaries = 0;
  for (const auto& c : checks)
    if (c.name.rfind("summary.", 0) == 0) {
      ++summaries;
      CHECK(c.passed);
    }
  CHECK(summaries == 8);
}

TEST_CASE("non-solution fields leave a large first-equation residual") {
  PhysicalParams p;
  const GridPtr g = RadialGrid::uniform(20.0, 2048);
  const RadialField u = RadialField::of(g, [](double r) { return std::exp(-0.5 * r * r); });
  const auto rep = solve_neutral_fd(u, p);
  auto [r1, r2] = residual_system(u, rep.n_field, p);
  // the neutral equation is solved to scheme accuracy, the matter one is not
  const double src = (p.q * p.coupling_c() * u.v.square()).abs().maxCoeff();
  CHECK(r2 < 1e-6 * src);
  CHECK(r1 > 1e-2);

  auto [z1, z2] = residual_system(RadialField::zero(g), RadialField::zero(g), p);
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);
}
