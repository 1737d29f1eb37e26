#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cmw/cmw.hpp"
#include "cmw/instances.hpp"

using namespace cmw;

TEST_CASE("example32 family: grid, budget, and payoff tables") {
  InstanceSpec spec;
  spec.kind = Example32Params{0.5, 4};
  CmInstance inst = generate_cm(spec);
  CHECK(inst.rows() == 1);
  CHECK(inst.second.w_points.size() == 5);
  CHECK(inst.second.w_points.front() == 0.0);
  CHECK(inst.second.w_points.back() == 1.0);
  CHECK(inst.rho == doctest::Approx(1.5));
  CHECK(inst.h == std::vector<double>{1.0});
  for (std::size_t k = 0; k < inst.cols(); ++k) {
    const double w = inst.second.w_of(k);
    CHECK(inst.cost_at(0, k) == doctest::Approx(w * w));
    CHECK(inst.f[k] == (w < 1.0 ? 1.0 : 0.0));
  }

  SUBCASE("modified family appends the tail section past w = 1") {
    spec.kind = Example32ModParams{4.0, 4};
    CmInstance mod = generate_cm(spec);
    // ceil(4 * sqrt(4)) = 8 extra points after the 5-point base grid
    CHECK(mod.second.w_points.size() == 13);
    CHECK(mod.second.w_points.back() == doctest::Approx(3.0));
    CHECK(std::is_sorted(mod.second.w_points.begin(),
                         mod.second.w_points.end()));
    CHECK(mod.rho == doctest::Approx(5.0));
  }
}

TEST_CASE("example32: slack budget equals eps, conditional slack fails") {
  InstanceSpec spec;
  spec.kind = Example32Params{0.5, 4};
  CmInstance inst = generate_cm(spec);
  // Meeting the conditional mean forces all mass onto w = 1, cost exactly 1.
  const Assumption1Report a1 = check_assumption_a1(inst);
  CHECK(a1.holds);
  CHECK(a1.a_value == doctest::Approx(0.5).epsilon(1e-9));
  // No plan can push the conditional mean above 1 inside [0, 1].
  const Assumption2Report a2 = check_assumption_a2(inst);
  CHECK_FALSE(a2.holds);
  CHECK(a2.b_plus <= 1e-9);
}

TEST_CASE("example32-mod: both assumption margins are strict") {
  InstanceSpec spec;
  spec.kind = Example32ModParams{0.5, 4};
  CmInstance inst = generate_cm(spec);
  const Assumption1Report a1 = check_assumption_a1(inst);
  CHECK(a1.holds);
  CHECK(a1.a_value == doctest::Approx(0.5).epsilon(1e-9));
  const Assumption2Report a2 = check_assumption_a2(inst);
  CHECK(a2.holds);
  CHECK(a2.b_plus > 0.1);
  CHECK(a2.b_minus == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lemma34 defaults reproduce the two-point reference data") {
  InstanceSpec spec;
  spec.kind = Lemma34Params{};
  CmInstance inst = generate_cm(spec);
  CHECK(inst.rows() == 2);
  CHECK(inst.second.w_points == std::vector<double>{0.0, 2.0});
  CHECK(inst.first.atoms[0].v == std::vector<double>{0.25});
  CHECK(inst.first.mass[0] == 0.5);
  // f rewards only w = 0, by the group's g value
  for (std::size_t k = 0; k < inst.cols(); ++k) {
    const double expected = inst.second.w_of(k) == 0.0
                                ? inst.g_values[inst.second.v_index(k)]
                                : 0.0;
    CHECK(inst.f[k] == expected);
  }
  // moves across v are excluded, moves in w are free
  for (std::size_t j = 0; j < inst.rows(); ++j)
    for (std::size_t k = 0; k < inst.cols(); ++k) {
      const bool same_v = inst.second.v_of(k) == inst.first.atoms[j].v;
      CHECK(inst.included(j, k) == same_v);
      if (same_v) CHECK(inst.cost_at(j, k) == 0.0);
    }
  // zero-cost plans exist, so the whole budget is slack
  const Assumption1Report a1 = check_assumption_a1(inst);
  CHECK(a1.holds);
  CHECK(a1.a_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("example35 tables: v = j/n, g = -1/sqrt(v)") {
  InstanceSpec spec;
  spec.kind = Example35Params{16, 1.0};
  CmInstance inst = generate_cm(spec);
  CHECK(inst.rows() == 16);
  CHECK(inst.first.atoms[0].v[0] == doctest::Approx(1.0 / 16));
  CHECK(inst.g_values[0] == doctest::Approx(-4.0));
  CHECK(inst.g_values[15] == doctest::Approx(-1.0));
  CHECK(inst.first.mass[7] == doctest::Approx(1.0 / 16));
}

TEST_CASE("lemma31: symmetric quantile atoms anchored at w = 1") {
  InstanceSpec spec;
  spec.kind = Lemma31Params{4, 10.0, 21};
  CmInstance inst = generate_cm(spec);
  CHECK(inst.rows() == 4);
  const double v0 = inst.first.atoms[0].v[0];
  const double v1 = inst.first.atoms[1].v[0];
  CHECK(v0 == doctest::Approx(-1.150349).epsilon(1e-5));
  CHECK(v0 == doctest::Approx(-inst.first.atoms[3].v[0]));
  CHECK(v1 == doctest::Approx(-inst.first.atoms[2].v[0]));
  for (const Atom& atom : inst.first.atoms) CHECK(atom.w == 1.0);
  CHECK(inst.second.w_points.size() == 21);
  CHECK(inst.second.w_points[2] == doctest::Approx(1.0));  // step 0.5
  // payoff is v (w - 1): zero along w = 1, both signs present
  for (std::size_t k = 0; k < inst.cols(); ++k)
    CHECK(inst.f[k] ==
          doctest::Approx(inst.second.v_of(k)[0] * (inst.second.w_of(k) - 1.0)));

  SUBCASE("larger J widens the quantile range") {
    spec.kind = Lemma31Params{64, 10.0, 21};
    CmInstance wide = generate_cm(spec);
    CHECK(wide.first.atoms[0].v[0] < -2.4);
  }
}

TEST_CASE("example33: zero cost, symmetric grid, negative payoff") {
  InstanceSpec spec;
  spec.kind = Example33Params{10.0, 200};
  CmInstance inst = generate_cm(spec);
  CHECK(inst.second.w_points.size() == 200);
  CHECK(inst.second.w_points.front() == -10.0);
  CHECK(inst.second.w_points.back() == 10.0);
  for (std::size_t k = 0; k < inst.cols(); ++k) {
    CHECK(inst.cost_at(0, k) == 0.0);
    CHECK(inst.f[k] < 0.0);
    CHECK(inst.f[k] >= -1.0);
  }
}

TEST_CASE("fat cantor scaffolding: removal counts and distances") {
  const FatCantorSets sets = fat_cantor_sets(3);
  CHECK(sets.removed.size() == 7);
  CHECK(sets.remaining.size() == 8);
  // first removal is the centered open interval of length 1/4
  CHECK(sets.removed[0].first == doctest::Approx(0.375));
  CHECK(sets.removed[0].second == doctest::Approx(0.625));
  CHECK(fat_cantor_dist(0.5, sets) > 0.0);
  CHECK(fat_cantor_dist(0.0, sets) == 0.0);
  CHECK(fat_cantor_dist(0.65, sets) == 0.0);
  CHECK(fat_cantor_dist(0.7, sets) > 0.0);  // inside a depth-3 removal

  SUBCASE("midpoint grids approximate the remainder measure 0.5625") {
    InstanceSpec spec;
    const auto kept_mass = [&](int n, int* removed) {
      spec.kind = FatCantorParams{3, n, 1.0};
      CmInstance inst = generate_cm(spec);
      *removed = 0;
      double mean_keep = 0.0;
      for (std::size_t j = 0; j < inst.rows(); ++j) {
        if (inst.g_values[j] == -1.0) ++*removed;
        mean_keep += (1.0 + inst.g_values[j]) * inst.first.mass[j];
      }
      return mean_keep;
    };
    // n = 64: the four step-3 intervals straddle single grid edges, so the
    // grid misses them and overshoots by exactly 4 cells = 1/16
    int removed = 0;
    CHECK(kept_mass(64, &removed) == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(removed == 24);
    // n = 128: every removal endpoint is a grid edge, the count is exact
    CHECK(kept_mass(128, &removed) == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(removed == 56);
  }
}

TEST_CASE("randomized transport instances are feasible and deterministic") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 17ULL, 99ULL}) {
    CmInstance inst = random_cm_instance(seed);
    const PrimalSolution ps = solve_primal(inst);
    CHECK(ps.status == LpStatus::Optimal);
    CHECK(ps.budget <= inst.rho + 1e-9);
    for (double r : ps.residual) CHECK(std::fabs(r) <= 1e-9);
  }
  InstanceSpec a, b;
  a.kind = CustomCmParams{random_cm_instance(42)};
  b.kind = CustomCmParams{random_cm_instance(42)};
  CHECK(spec_to_json(a) == spec_to_json(b));
  b.kind = CustomCmParams{random_cm_instance(43)};
  CHECK(spec_to_json(a) != spec_to_json(b));
}

TEST_CASE("randomized uncertain programs validate and stay deterministic") {
  for (bool quad : {false, true}) {
    InstanceSpec a, b;
    a.kind = CustomPwParams{random_uncertain_program(7, quad)};
    b.kind = CustomPwParams{random_uncertain_program(7, quad)};
    CHECK(spec_to_json(a) == spec_to_json(b));
    const auto& prog = std::get<CustomPwParams>(a.kind).prog;
    CHECK(prog.functions.size() == prog.m() + 1);
    CHECK(prog.functions.size() >= 1 + 1 + 2 * prog.n);
  }
}

TEST_CASE("instance files round-trip bit-exactly") {
  InstanceSpec spec;
  spec.seed = 1234;
  spec.kind = CustomCmParams{random_cm_instance(5)};
  const std::string text = spec_to_json(spec);
  const InstanceSpec back = spec_from_json(text);
  CHECK(spec_to_json(back) == text);
  CHECK(back.seed == 1234);
  const auto& orig = std::get<CustomCmParams>(spec.kind).inst;
  const auto& copy = std::get<CustomCmParams>(back.kind).inst;
  REQUIRE(copy.cost.size() == orig.cost.size());
  for (std::size_t i = 0; i < orig.cost.size(); ++i)
    CHECK(copy.cost[i] == orig.cost[i]);  // includes the +inf entries
  CHECK(copy.rho == orig.rho);
  CHECK(copy.h == orig.h);
  CHECK(copy.f == orig.f);

  SUBCASE("named families carry params, not tables") {
    InstanceSpec named;
    named.kind = Example32ModParams{4.0, 64};
    const std::string t = spec_to_json(named);
    CHECK(t.find("example32-mod") != std::string::npos);
    CHECK(t.find("payload") == std::string::npos);
    const InstanceSpec b2 = spec_from_json(t);
    CHECK(std::get<Example32ModParams>(b2.kind).n == 64);
    CHECK(spec_hash(named) == spec_hash(b2));
  }

  SUBCASE("file save/load") {
    const char* path = "roundtrip_instance.json";
    save_spec(spec, path);
    const InstanceSpec loaded = load_spec(path);
    CHECK(spec_to_json(loaded) == text);
    std::remove(path);
  }
}

TEST_CASE("uncertain programs round-trip through files") {
  InstanceSpec spec;
  spec.kind = CustomPwParams{random_uncertain_program(11, true)};
  const std::string text = spec_to_json(spec);
  const InstanceSpec back = spec_from_json(text);
  CHECK(spec_to_json(back) == text);
  CHECK_THROWS_AS(generate_cm(back), std::invalid_argument);
}

TEST_CASE("malformed instance files fail with a diagnostic") {
  CHECK_THROWS_WITH_AS(spec_from_json("{\"version\": 1, \"kind\""),
                       doctest::Contains("instance file error"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(spec_from_json("{\"version\": 2, \"kind\": \"lemma34\"}"),
                       doctest::Contains("version"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      spec_from_json("{\"version\": 1, \"kind\": \"nonesuch\", \"params\": {}}"),
      doctest::Contains("unknown kind"), std::runtime_error);
  // a custom transport payload missing its budget names the field
  InstanceSpec spec;
  spec.kind = CustomCmParams{random_cm_instance(1)};
  std::string text = spec_to_json(spec);
  const std::string needle = "\"rho\":";
  const std::size_t at = text.find(needle);
  REQUIRE(at != std::string::npos);
  const std::size_t end = text.find(',', at);
  text.erase(at, end - at + 1);
  CHECK_THROWS_WITH_AS(spec_from_json(text), doctest::Contains("rho"),
                       std::runtime_error);
}

TEST_CASE("spec hashes are stable 16-digit hex ids") {
  InstanceSpec spec;
  spec.kind = Lemma34Params{};
  const std::string h = spec_hash(spec);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(h == spec_hash(spec));
  spec.seed = 1;
  CHECK(h != spec_hash(spec));
}

TEST_CASE("family tags match the CLI vocabulary") {
  const auto tag = [](InstanceKind kind) {
    InstanceSpec spec;
    spec.kind = std::move(kind);
    return kind_name(spec);
  };
  CHECK(tag(Example32Params{}) == "example32");
  CHECK(tag(Example32ModParams{}) == "example32-mod");
  CHECK(tag(Lemma31Params{}) == "lemma31");
  CHECK(tag(Lemma34Params{}) == "lemma34");
  CHECK(tag(Example35Params{}) == "example35");
  CHECK(tag(FatCantorParams{}) == "fat-cantor");
  CHECK(tag(Example33Params{}) == "example33");
  CHECK(tag(CustomCmParams{random_cm_instance(1)}) == "custom-cm");
  CHECK(tag(CustomPwParams{random_uncertain_program(1, false)}) == "custom-pw");
}
