#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cmw/conjugate.hpp"

using namespace cmw;

namespace {
const double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("affine conjugate is the indicator of its own slope") {
  XFunction f{XKind::Affine, {}, {2.0, -1.0}, 0.75};
  auto hit = conjugate(f, {2.0, -1.0});
  REQUIRE(hit.finite);
  CHECK(hit.value == doctest::Approx(-0.75));
  CHECK_FALSE(conjugate(f, {2.0, -0.999}).finite);
}

TEST_CASE("diagonal quadratic conjugate closed form and maximizer") {
  XFunction f{XKind::DiagQuadratic, {2.0}, {0.0}, 0.0};
  auto c = conjugate(f, {4.0});
  REQUIRE(c.finite);
  CHECK(c.value == doctest::Approx(4.0));
  REQUIRE(c.maximizer.size() == 1);
  CHECK(c.maximizer[0] == doctest::Approx(2.0));

  // Flat coordinate: finite only on the affine slope, value ignores it.
  XFunction g{XKind::DiagQuadratic, {1.0, 0.0}, {0.0, 3.0}, 1.0};
  CHECK_FALSE(conjugate(g, {1.0, 2.9999}).finite);
  auto cg = conjugate(g, {1.0, 3.0});
  REQUIRE(cg.finite);
  CHECK(cg.value == doctest::Approx(0.5 - 1.0));
}

TEST_CASE("Fenchel-Young holds with equality at the returned maximizer") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    XFunction f;
    f.kind = XKind::DiagQuadratic;
    f.q.resize(n);
    f.a.resize(n);
    f.d = u(rng);
    for (std::size_t i = 0; i < n; ++i) { f.q[i] = pos(rng); f.a[i] = u(rng); }
    std::vector<double> dstar(n);
    for (auto& v : dstar) v = u(rng);
    auto c = conjugate(f, dstar);
    REQUIRE(c.finite);
    // f(x) + f*(dstar) >= dstar'x for random x, equality at the maximizer.
    for (int s = 0; s < 10; ++s) {
      std::vector<double> x(n);
      for (auto& v : x) v = u(rng);
      double lhs = f.eval(x) + c.value, rhs = 0.0;
      for (std::size_t i = 0; i < n; ++i) rhs += dstar[i] * x[i];
      CHECK(lhs >= rhs - 1e-9);
    }
    double at_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) at_max += dstar[i] * c.maximizer[i];
    CHECK(f.eval(c.maximizer) + c.value == doctest::Approx(at_max).epsilon(1e-9));
  }
}

TEST_CASE("right scalar multiplication scales arguments and value") {
  XFunction f{XKind::DiagQuadratic, {1.0}, {0.0}, 0.0};
  BiConjugate h = [&](const std::vector<double>& z,
                      const std::vector<double>& dstar) {
    // (z, dstar) -> f*(dstar) + z shift, an arbitrary bivariate test payload
    auto c = conjugate(f, dstar);
    return c.finite ? c.value + z[0] : inf;
  };
  // c > 0: c * h(z/c, dstar/c) = c * ((dstar/c)^2/2 + z/c) = dstar^2/(2c) + z.
  CHECK(right_scale(h, 2.0, {3.0}, {4.0}) == doctest::Approx(16.0 / 4.0 + 3.0));
  // c = 0 is the indicator of the origin pair.
  CHECK(right_scale(h, 0.0, {0.0}, {0.0}) == 0.0);
  CHECK(right_scale(h, 0.0, {1e-3}, {0.0}) == inf);
  CHECK(right_scale(h, 0.0, {0.0}, {-1e-3}) == inf);
  CHECK_THROWS_AS(right_scale(h, -1.0, {0.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("relative-interior membership on the unit square") {
  std::vector<std::vector<double>> square = {
      {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  CHECK(ri_membership({0.5, 0.5}, 1.0, square));
  CHECK(ri_membership({0.25, 0.75}, 1.0, square, 1e-9));
  // Boundary points admit no representation with every lambda >= delta.
  CHECK_FALSE(ri_membership({0.0, 0.5}, 1.0, square, 1e-6));
  CHECK_FALSE(ri_membership({1.5, 0.5}, 1.0, square));
  // Scaled membership: z in wstar * Z.
  CHECK(ri_membership({1.0, 1.0}, 2.0, square));
  CHECK_FALSE(ri_membership({2.5, 1.0}, 2.0, square));
  CHECK_THROWS_AS(ri_membership({0.0, 0.0}, 0.0, square), std::invalid_argument);

  // Singleton uncertainty set: ri is the point itself.
  std::vector<std::vector<double>> point = {{2.0}};
  CHECK(ri_membership({2.0}, 1.0, point));
  CHECK_FALSE(ri_membership({2.1}, 1.0, point));

  CHECK(hull_membership({0.0, 0.5}, 1.0, square));
  CHECK_FALSE(hull_membership({-0.1, 0.5}, 1.0, square));
}
