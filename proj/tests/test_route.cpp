#include <doctest.h>

#include "oracles.hpp"
#include "shc/core.hpp"
#include "shc/route.hpp"
#include "shc/validate.hpp"

using namespace shc;

namespace {

// Greedy walk from the edge list: at each step take the unique live
// neighbour inside the child of lcp(cur, t) that holds t.
std::optional<Path> brute_greedy(const SemiHypercube& g, const VertexTrie& live, Vertex s, Vertex t) {
  const Universe& u = g.universe();
  Path p{s};
  Vertex cur = s;
  while (cur != t) {
    Cluster c = u.lcp(cur, t);
    Cluster want = u.child(c, u.digit(t, c.depth));
    std::optional<Vertex> next;
    for (Vertex y : oracle::neighbours(g, cur))
      if (live.contains(y) && oracle::in_cluster(u, want, y) && oracle::in_cluster(u, c, y)) next = y;
    if (!next) return std::nullopt;
    cur = *next;
    p.push_back(cur);
  }
  return p;
}

bool valid_walk(const SemiHypercube& g, const VertexTrie& live, const Path& p) {
  for (Vertex v : p)
    if (!live.contains(v)) return false;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto nb = oracle::neighbours(g, p[i]);
    if (!std::binary_search(nb.begin(), nb.end(), p[i + 1])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("greedy path examples") {
  SemiHypercube h = build_hypercube_style(2, 2);
  const Universe& u = h.universe();
  VertexTrie live(u);
  Vertex a = u.parse_vertex("1.1"), b = u.parse_vertex("2.2");
  auto same = greedy_path(h, live, a, a);
  REQUIRE(same);
  CHECK(same->size() == 1);
  auto p = greedy_path(h, live, a, b);
  REQUIRE(p);
  CHECK(*p == Path{a, u.parse_vertex("2.1"), b});
  live.remove(u.parse_vertex("2.1"));
  CHECK_FALSE(greedy_path(h, live, a, b));
  CHECK_THROWS_AS(greedy_path(h, live, u.parse_vertex("2.1"), b), NotPresentError);
}

TEST_CASE("greedy paths match the edge-list walk") {
  SemiHypercube g = build_random_shc(3, 3, 17);
  const Universe& u = g.universe();
  VertexTrie live(u);
  Rng rng(2);
  for (int i = 0; i < 8; ++i) live.remove(live.sample(u.root(), rng));
  for (Vertex s = 0; s < u.n(); ++s)
    for (Vertex t = 0; t < u.n(); ++t) {
      if (!live.contains(s) || !live.contains(t)) continue;
      auto got = greedy_path(g, live, s, t);
      REQUIRE(got == brute_greedy(g, live, s, t));
      if (got) {
        CHECK(got->size() <= static_cast<std::size_t>(u.d()) + 1);
        CHECK(greedy_path(g, live, s, t) == got);
      }
    }
}

TEST_CASE("reach sets") {
  SemiHypercube h = build_hypercube_style(2, 2);
  VertexTrie live(h.universe());
  for (Vertex t = 0; t < h.n(); ++t) CHECK(reach_set_oracle(h, live, t, h.universe().root()).members.size() == 4);

  SemiHypercube g = build_random_shc(3, 3, 5);
  const Universe& u = g.universe();
  VertexTrie cut(u);
  cut.remove(3);
  cut.remove(20);
  Cluster c = u.parse_cluster("1");
  Vertex t = u.parse_vertex("1.2.2");
  ReachSet r = reach_set_oracle(g, cut, t, c);
  std::vector<Vertex> want;
  for (Vertex s = 0; s < u.n(); ++s)
    if (cut.contains(s) && oracle::in_cluster(u, c, s) && brute_greedy(g, cut, s, t)) want.push_back(s);
  CHECK(r.members == want);
}

TEST_CASE("noncritical sampler") {
  SemiHypercube h = build_hypercube_style(2, 3);
  VertexTrie live(h.universe());
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    Vertex s = static_cast<Vertex>(rng.below(h.n())), t = static_cast<Vertex>(rng.below(h.n()));
    SampledPath p = sample_noncritical_path(h, live, s, t, rng);
    REQUIRE(p.attempts == 1);
    REQUIRE(p.path.front() == s);
    REQUIRE(p.path.back() == t);
    REQUIRE(p.path.size() <= 7u);
  }
  for (int i = 0; i < 20; ++i) {
    SampledPath p = sample_noncritical_path(h, live, 3, 3, rng);
    CHECK(p.path.front() == 3);
    CHECK(p.path.back() == 3);
    CHECK(valid_walk(h, live, p.path));
  }

  // A lone vertex cut off from the rest exhausts the retry cap.
  VertexTrie lone(h.universe());
  Vertex s = 0;
  for (Vertex w : oracle::neighbours(h, s)) lone.remove(w);
  CHECK_THROWS_AS(sample_noncritical_path(h, lone, s, 7, rng), SamplingFailure);
}

TEST_CASE("escape examples") {
  SemiHypercube fresh = build_random_shc(3, 2, 1);
  VertexTrie all(fresh.universe());
  Rng rng(1);
  for (Vertex s = 0; s < fresh.n(); ++s) CHECK(escape(fresh, all, Tau::of(1, 100), s, rng) == Path{s});

  SemiHypercube h = build_hypercube_style(3, 2);
  const Universe& u = h.universe();
  VertexTrie live(u);
  live.remove(u.parse_vertex("1.1"));
  Tau tau = Tau::of(1, 9);
  REQUIRE(validate(h, live, tau).valid);
  for (Vertex s : {u.parse_vertex("1.2"), u.parse_vertex("1.3")}) {
    for (int i = 0; i < 50; ++i) {
      EscapeTrace tr;
      Path p = escape(h, live, tau, s, rng, &tr);
      REQUIRE(p.front() == s);
      CHECK(valid_walk(h, live, p));
      CHECK(u.digit(p.back(), 0) != 0);
      CHECK(isolation(live, tau, p.back()) == 0);
      REQUIRE(!tr.isolation.empty());
      CHECK(tr.isolation.front() == 1);
    }
  }
}

TEST_CASE("escape and sample_path on valid pruned instances") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SemiHypercube g = build_random_shc(4, 3, seed);
    const Universe& u = g.universe();
    VertexTrie live(u);
    Tau tau = Tau::of(1, 8);
    Rng del(seed + 100);
    // Carve one corner of the cube; keep only deletions that stay valid.
    for (int tries = 0; tries < 200 && !live.empty(u.parse_cluster("1")); ++tries) {
      Vertex v = live.sample(u.parse_cluster("1"), del);
      live.remove(v);
      if (!validate(g, live, tau).valid) live.insert(v);
    }
    REQUIRE(validate(g, live, tau).valid);
    Rng rng(seed);
    std::vector<Vertex> alive = live.members(u.root());
    for (int i = 0; i < 200; ++i) {
      Vertex s = alive[rng.below(alive.size())], t = alive[rng.below(alive.size())];
      SamplePathResult r = sample_path(g, live, tau, s, t, rng);
      REQUIRE(r.path.front() == s);
      REQUIRE(r.path.back() == t);
      REQUIRE(valid_walk(g, live, r.path));
      REQUIRE(path_is_valid(g, live, r.path));
      for (const EscapeTrace* tr : {&r.escape_s, &r.escape_t}) {
        for (std::size_t j = 1; j < tr->isolation.size(); ++j) CHECK(tr->isolation[j] < tr->isolation[j - 1]);
        CHECK(tr->isolation.size() <= static_cast<std::size_t>(max_isolation(u.d())));
      }
    }
  }
}

TEST_CASE("sample_path replays under a fixed seed") {
  SemiHypercube g = build_random_shc(4, 2, 3);
  VertexTrie live(g.universe());
  live.remove(0);
  Tau tau = Tau::of(1, 8);
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    Vertex s = static_cast<Vertex>(1 + i % 15), t = static_cast<Vertex>(15 - i % 15);
    CHECK(sample_path(g, live, tau, s, t, a).path == sample_path(g, live, tau, s, t, b).path);
  }
}

TEST_CASE("path validity and congestion") {
  SemiHypercube h = build_hypercube_style(2, 2);
  VertexTrie live(h.universe());
  CHECK(path_is_valid(h, live, {0, 1, 3}));
  CHECK_FALSE(path_is_valid(h, live, {0, 3}));
  EdgeSet removed{edge_key(0, 1)};
  CHECK_FALSE(path_is_valid(h, live, {0, 1, 3}, &removed));

  CongestionMap none = measure_congestion({});
  CHECK(none.max == 0);
  CHECK(none.total == 0);
  CHECK(none.mean() == 0.0);
  CongestionMap two = measure_congestion({{0, 1, 3}, {0, 1, 3}});
  CHECK(two.count.size() == 2);
  for (auto [e, n] : two.count) CHECK(n == 2);
  CHECK(two.total == 4);

  SemiHypercube c = build_hypercube_style(2, 3);
  VertexTrie cl(c.universe());
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Path> paths;
    for (int i = 0; i < 1000; ++i) {
      Vertex s = static_cast<Vertex>(i % 8), t = static_cast<Vertex>((i * 5 + 3) % 8);
      paths.push_back(sample_noncritical_path(c, cl, s, t, rng).path);
    }
    return measure_congestion(paths);
  };
  CongestionMap m1 = run(1), m2 = run(1);
  CHECK(m1.max == m2.max);
  std::uint64_t len = 0;
  for (auto [e, n] : m1.count) len += n;
  CHECK(len == m1.total);
  CHECK(m1.max <= 4 * run(2).max);
}
