#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cmw/measures.hpp"

using namespace cmw;

namespace {

/// Two-atom first support over W = {0, 2}: the half/half coupling used by the
/// dual-nonexistence template.
Coupling half_half() {
  Coupling g;
  g.first.atoms = {Atom{{0.25}, 0.0}, Atom{{1.0}, 0.0}};
  g.first.mass = {0.5, 0.5};
  g.second.v_points = {{0.25}, {1.0}};
  g.second.w_points = {0.0, 2.0};
  g.gamma.assign(2 * 4, 0.0);
  // atom j transports only to its own v, split evenly between w = 0 and w = 2
  g.at(0, 0) = 0.25; g.at(0, 1) = 0.25;
  g.at(1, 2) = 0.25; g.at(1, 3) = 0.25;
  return g;
}

Coupling random_coupling(std::mt19937_64& rng, std::size_t J, std::size_t nv,
                         std::size_t nw) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Coupling g;
  g.second.w_points.resize(nw);
  for (std::size_t i = 0; i < nw; ++i) g.second.w_points[i] = double(i) + u(rng);
  for (std::size_t i = 0; i < nv; ++i) g.second.v_points.push_back({u(rng) + i});
  std::vector<double> masses(J);
  double tot = 0.0;
  for (auto& m : masses) { m = u(rng); tot += m; }
  for (std::size_t j = 0; j < J; ++j) {
    g.first.atoms.push_back(Atom{g.second.v_points[j % nv], 0.0});
    g.first.mass.push_back(masses[j] / tot);
  }
  g.gamma.assign(J * g.second.size(), 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> row(g.second.size());
    double rs = 0.0;
    for (auto& x : row) { x = u(rng); rs += x; }
    for (std::size_t k = 0; k < row.size(); ++k)
      g.at(j, k) = g.first.mass[j] * row[k] / rs;
  }
  return g;
}

}  // namespace

TEST_CASE("grid flattening and validation") {
  ProductGrid grid;
  grid.v_points = {{0.0}, {1.0}};
  grid.w_points = {0.0, 0.5, 1.0};
  grid.validate();
  CHECK(grid.size() == 6);
  CHECK(grid.v_of(4)[0] == 1.0);
  CHECK(grid.w_of(4) == 0.5);

  grid.w_points = {0.0, 0.0};
  CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
}

TEST_CASE("grouping is bitwise on v-hat") {
  DiscreteMeasure mu;
  mu.atoms = {Atom{{0.5}, 0.0}, Atom{{0.5}, 1.0}, Atom{{0.5 + 1e-17}, 0.0}};
  mu.mass = {0.25, 0.25, 0.5};
  auto idx = group_by_vhat(mu);
  // 0.5 + 1e-17 rounds to the double 0.5, so exactly one group remains.
  CHECK(idx.size() == 1);
  CHECK(idx.nu[0] == doctest::Approx(1.0));

  mu.atoms[2].v = {std::nextafter(0.5, 1.0)};
  idx = group_by_vhat(mu);
  CHECK(idx.size() == 2);  // one ulp away is a different group
  CHECK(idx.members[0].size() == 2);
}

TEST_CASE("half/half coupling on {0,2} has zero residual against h = 1") {
  auto g = half_half();
  g.validate();
  auto r = conditional_residual(g, {1.0, 1.0});
  REQUIRE(r.value.size() == 2);
  CHECK(std::fabs(r.value[0]) <= 1e-15);
  CHECK(std::fabs(r.value[1]) <= 1e-15);

  auto marg = second_marginal(g);
  CHECK(marg.mass[0] == doctest::Approx(0.25));
  CHECK(marg.mass[3] == doctest::Approx(0.25));
}

TEST_CASE("tv distance is a metric and hits 1 on disjoint couplings") {
  auto a = half_half();
  auto b = a;
  // Move everything to the opposite w within each atom: disjoint supports.
  b.gamma.assign(b.gamma.size(), 0.0);
  b.at(0, 2) = 0.5;  // v mismatch columns are legal coupling entries
  b.at(1, 0) = 0.5;
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));
  CHECK(tv_distance(a, b) == tv_distance(b, a));

  std::mt19937_64 rng(7);
  auto x = random_coupling(rng, 3, 2, 4);
  Coupling y = x, z = x;
  std::shuffle(y.gamma.begin(), y.gamma.end(), rng);
  // Row sums changed by the shuffle, so rebuild y as a legal perturbation.
  y = mix(x, x, 0.5);
  for (std::size_t j = 0; j < z.rows(); ++j) {
    // transfer mass inside a row: keeps marginals, changes the matrix
    auto lo = z.at(j, 0), hi = z.at(j, 1);
    z.at(j, 0) = hi; z.at(j, 1) = lo;
  }
  CHECK(tv_distance(x, y) == doctest::Approx(0.0));
  CHECK(tv_distance(x, z) + tv_distance(z, y) >= tv_distance(x, y) - 1e-14);
}

TEST_CASE("mix is the entrywise convex combination and keeps invariants") {
  std::mt19937_64 rng(11);
  auto a = random_coupling(rng, 4, 2, 3);
  auto b = a;
  for (std::size_t j = 0; j < b.rows(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < b.cols(); ++k) row += b.at(j, k);
    for (std::size_t k = 0; k < b.cols(); ++k) b.at(j, k) = 0.0;
    b.at(j, 2) = row;
  }
  b.validate();
  auto m = mix(a, b, 0.25);
  m.validate();
  for (std::size_t i = 0; i < m.gamma.size(); ++i)
    CHECK(m.gamma[i] == doctest::Approx(0.75 * a.gamma[i] + 0.25 * b.gamma[i]));
  CHECK_THROWS_AS(mix(a, b, 1.5), std::invalid_argument);
}

TEST_CASE("residual is linear under mixing") {
  std::mt19937_64 rng(13);
  auto a = random_coupling(rng, 4, 2, 3);
  auto b = a;
  for (std::size_t j = 0; j < b.rows(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < b.cols(); ++k) row += b.at(j, k);
    for (std::size_t k = 0; k < b.cols(); ++k) b.at(j, k) = 0.0;
    b.at(j, 0) = row;
  }
  const auto idx = group_by_vhat(a.first);
  std::vector<double> h(idx.size(), 1.0);
  const double t = 0.375;
  auto ra = conditional_residual(a, h);
  auto rb = conditional_residual(b, h);
  auto rm = conditional_residual(mix(a, b, t), h);
  for (std::size_t q = 0; q < idx.size(); ++q)
    CHECK(rm.value[q] ==
          doctest::Approx((1 - t) * ra.value[q] + t * rb.value[q]).epsilon(1e-12));
}

TEST_CASE("expectation handles excluded pairs without 0 * inf poisoning") {
  auto g = half_half();
  std::vector<double> cost(g.gamma.size(), 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  // v-mismatch pairs carry infinite cost but zero coupling mass.
  cost[0 * 4 + 2] = inf; cost[0 * 4 + 3] = inf;
  cost[1 * 4 + 0] = inf; cost[1 * 4 + 1] = inf;
  CHECK(expectation_pairwise(g, cost) == 0.0);

  std::vector<double> f = {1.0, 0.0, 1.0, 0.0};  // indicator of w = 0
  CHECK(expectation(g, f) == doctest::Approx(0.5));
}

TEST_CASE("shape mismatches are rejected") {
  auto a = half_half();
  auto b = a;
  b.second.w_points = {0.0, 3.0};
  CHECK_THROWS_AS(tv_distance(a, b), std::invalid_argument);
  CHECK_THROWS_AS(conditional_residual(a, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(expectation(a, {1.0}), std::invalid_argument);
}
