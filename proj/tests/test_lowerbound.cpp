#include <doctest.h>

#include "oracles.hpp"
#include "shc/lowerbound.hpp"

using namespace shc;

TEST_CASE("closed forms") {
  HardFamilySpec s{4, 8, 4, Tau::of(1, 4)};
  CHECK(s.hard_size(4) == 4);
  CHECK(s.hard_size(5) == 4);
  CHECK(s.hard_size(6) == 8);
  CHECK(s.hard_size(8) == 16);
  CHECK(s.cut_size(7) == 4);
  CHECK(s.is_bad(4));
  CHECK_FALSE(s.is_bad(5));
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(build_hard_instance(1, 4, 4, Tau::of(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(build_hard_instance(4, 4, 1, Tau::of(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(build_hard_instance(4, 3, 4, Tau::of(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(build_hard_instance(4, 4, 4, Tau::of(1, 5)), std::invalid_argument);
}

TEST_CASE("base level is a clique child") {
  for (int k : {3, 4, 5}) {
    HardInstance h = build_hard_instance(k, 4, 4, Tau::of(1, static_cast<std::uint64_t>(k)));
    CHECK(h.hard.size() == static_cast<std::size_t>(k));
    CHECK(measured_cut(h) == static_cast<std::uint64_t>(k));
    const Universe& u = h.g.universe();
    Cluster c = u.lcp(h.hard.front(), h.hard.back());
    CHECK(c.depth == 3);
    for (Vertex a : h.hard)
      for (Vertex b : h.hard)
        if (a != b) CHECK(h.g.adjacent(a, b));
    CHECK(validate(h.g, h.live, h.spec.tau, &h.removed).valid);
    CHECK(oracle::valid(h.g, h.live, h.spec.tau, &h.removed));
  }
}

TEST_CASE("built instances match the closed forms") {
  for (int d = 4; d <= 7; ++d) {
    HardInstance h = build_hard_instance(4, d, 4, Tau::of(1, 4));
    CHECK(validate(h.g, h.live, h.spec.tau, &h.removed).valid);
    CHECK(h.hard.size() == h.spec.hard_size(d));
    CHECK(measured_cut(h) == h.spec.cut_size(d));
    REQUIRE(h.levels.size() == static_cast<std::size_t>(d - 4 + 1));
    for (const HardLevel& lv : h.levels) {
      CHECK(lv.bad == h.spec.is_bad(lv.m));
      CHECK(lv.hard == h.spec.hard_size(lv.m));
      CHECK(lv.cut == h.spec.cut_size(lv.m));
    }
  }
}

TEST_CASE("hard demand") {
  auto ratio = [](int d) {
    HardInstance h = build_hard_instance(4, d, 4, Tau::of(1, 4));
    HardDemand dem = hard_demand(h);
    std::map<Vertex, std::uint64_t> load;
    for (const DemandPair& p : dem.pairs) {
      ++load[p.a];
      ++load[p.b];
    }
    for (auto [v, n] : load) CHECK(n <= instance_degree(h, v));
    CHECK(dem.cut == measured_cut(h));
    std::uint64_t s = h.spec.hard_size(d);
    // crossing / cut >= s (k-1) / (2k)
    CHECK(2 * 4 * dem.crossing >= s * 3 * dem.cut);
    return dem.ratio();
  };
  double r4 = ratio(4), r6 = ratio(6);
  CHECK(r4 >= 3.0);
  CHECK(r6 / r4 >= 1.5);
  CHECK(r6 / r4 <= 2.5);
}
