#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "shc/embed.hpp"
#include "shc/io.hpp"

using namespace shc;

namespace {

EmbedOptions loose(std::uint64_t rho = 1) { return {Tau::of(1, 8), {Mode::Experimental, rho}}; }

// U_e recomputed from the paths of surviving H edges.
std::set<std::uint64_t> brute_users(const EmbedPruner& p, Vertex x, Vertex y) {
  std::set<std::uint64_t> out;
  const Embedding& e = p.embedding();
  for (const auto& [hk, path] : e.paths) {
    Vertex a = static_cast<Vertex>(hk >> 32), b = static_cast<Vertex>(hk & 0xffffffffu);
    if (!p.core().contains(a) || !p.core().contains(b)) continue;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (edge_key(path[i], path[i + 1]) == edge_key(x, y)) out.insert(hk);
  }
  return out;
}

}  // namespace

TEST_CASE("embedding checks") {
  SemiHypercube h = build_random_shc(3, 2, 1);
  Embedding id = identity_embedding(h);
  CHECK_NOTHROW(check_embedding(id));
  CHECK(embedding_congestion(id) == 1);
  CHECK(embedding_dilation(id) == 1);

  Embedding sub = subdivided_embedding(h, 5, 3);
  CHECK_NOTHROW(check_embedding(sub));
  CHECK(sub.host.n == h.n() + 5);
  CHECK(embedding_dilation(sub) == 2);

  Embedding lonely = id;
  ++lonely.host.n;
  CHECK_THROWS_AS(check_embedding(lonely), FormatError);

  Embedding wrong = id;
  auto it = wrong.paths.begin();
  std::reverse(it->second.begin(), it->second.end());
  CHECK_THROWS_AS(check_embedding(wrong), FormatError);

  Embedding missing = id;
  missing.host.edges.erase(missing.paths.begin()->first);
  CHECK_THROWS_AS(check_embedding(missing), FormatError);
}

TEST_CASE("embedding file round trip") {
  Embedding e = subdivided_embedding(build_random_shc(2, 3, 4), 4, 9);
  std::ostringstream hs, es;
  write_host(hs, e.host);
  write_embedding(es, e);
  std::istringstream hin(hs.str()), ein(es.str());
  HostGraph host = read_host(hin);
  Embedding back = read_embedding(ein, host);
  CHECK(back.paths == e.paths);
  CHECK(back.host_of == e.host_of);
  CHECK(back.host.edges == e.host.edges);
}

TEST_CASE("identity embedding") {
  SemiHypercube h = build_random_shc(4, 2, 2);
  Embedding e = identity_embedding(h);
  EmbedPruner p(e, loose());
  CHECK(p.kappa() == 1);
  CHECK(p.dilation() == 1);
  for (Vertex v = 0; v < h.n(); ++v) {
    CHECK(p.rep(v) == v);
    CHECK(p.connection(v) == Path{v});
  }
  CHECK(p.check_invariants().empty());

  // Same seed, same graph: the embedded sample is the direct one.
  Rng a(5), b(5);
  for (int i = 0; i < 50; ++i) {
    Vertex s = static_cast<Vertex>(i % h.n()), t = static_cast<Vertex>((i * 7 + 1) % h.n());
    if (s == t) continue;
    CHECK(p.sample_path(s, t, a) == shc::sample_path(h, p.core(), p.tau(), s, t, b).path);
  }
  Rng c(1);
  CHECK(p.sample_path(3, 3, c) == Path{3});
}

TEST_CASE("identity prune on the two-vertex cube") {
  SemiHypercube h = build_random_shc(2, 1, 1);
  Embedding e = identity_embedding(h);
  EmbedPruner p(e, loose());
  EmbedStep s = p.prune_step(0, 1);
  CHECK(s.aff == std::vector<Vertex>{0, 1});
  CHECK(p.core().size() == 0);
  std::vector<Vertex> trim = s.trim;
  std::sort(trim.begin(), trim.end());
  CHECK(trim == std::vector<Vertex>{0, 1});
  CHECK(p.host_alive_count() == 0);
  CHECK_THROWS_AS(p.prune_step(0, 1), NotPresentError);
}

TEST_CASE("deleting an unused host edge changes nothing") {
  SemiHypercube h = build_hypercube_style(2, 2);
  Embedding e = identity_embedding(h);
  e.host.edges.insert(edge_key(0, 3));
  EmbedPruner p(e, loose());
  EmbedStep s = p.prune_step(0, 3);
  CHECK(s.aff.empty());
  CHECK(s.trim.empty());
  CHECK(s.vminus.empty());
  CHECK(p.core().size() == 4);
  CHECK_FALSE(p.host_edge_alive(0, 3));
}

TEST_CASE("subdivided embedding under edge deletions") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SemiHypercube h = build_random_shc(4, 2, seed);
    Embedding e = subdivided_embedding(h, 10, seed);
    EmbedPruner p(e, loose(1));
    Rng rng(seed);
    std::vector<std::uint64_t> edges(e.host.edges.begin(), e.host.edges.end());
    for (int step = 0; step < 60 && p.host_alive_count() > 0; ++step) {
      std::uint64_t k = edges[rng.below(edges.size())];
      Vertex x = static_cast<Vertex>(k >> 32), y = static_cast<Vertex>(k & 0xffffffffu);
      if (!p.host_edge_alive(x, y)) continue;
      EmbedStep s = p.prune_step(x, y);
      REQUIRE(p.check_invariants().empty());
      CHECK(s.trim.size() <= (p.dilation() + 1) * s.eminus.size());
      CHECK(s.aff.size() <= 2 * p.kappa());
      for (Vertex t : s.trim) CHECK_FALSE(p.host_alive(t));
      for (std::uint64_t q : edges) {
        Vertex a = static_cast<Vertex>(q >> 32), b = static_cast<Vertex>(q & 0xffffffffu);
        if (p.host_edge_alive(a, b)) {
          std::set<std::uint64_t> want = brute_users(p, a, b);
          for (std::uint64_t hk : want) REQUIRE(p.covering(a).count(hk));
        }
      }
      std::vector<Vertex> alive;
      for (Vertex v = 0; v < e.host.n; ++v)
        if (p.host_alive(v)) {
          alive.push_back(v);
          REQUIRE(p.covering(v).count(p.conn(v)));
          Path c = p.connection(v);
          REQUIRE(c.front() == v);
          REQUIRE(c.back() == p.rep(v));
          REQUIRE(p.host_path_valid(c));
        }
      // Sampling needs a valid core; rho = 1 does not promise one.
      if (alive.size() < 2 || !validate(h, p.core(), p.tau()).valid) continue;
      for (int i = 0; i < 10; ++i) {
        Vertex a = alive[rng.below(alive.size())], b = alive[rng.below(alive.size())];
        Path path = p.sample_path(a, b, rng);
        REQUIRE(path.front() == a);
        REQUIRE(path.back() == b);
        REQUIRE(p.host_path_valid(path));
      }
    }
  }
}

TEST_CASE("embedded router") {
  SemiHypercube h = build_random_shc(4, 2, 7);
  Embedding e = identity_embedding(h);
  EmbedOptions opt = loose(1);

  EmbedRouter er(e, {}, 2, opt);
  CHECK(er.projected_load() == 2);
  CHECK(er.reroute_step({{1, 9, 4}}, {}) == std::set<std::uint64_t>{4});

  // Add-only workloads match the router on H directly.
  EmbedRouter a(e, {}, 2, opt);
  DynamicRouter b(h, VertexTrie(h.universe()), {}, {}, Tau::of(1, 8), 2, Mode::Experimental);
  Rng rng(3);
  std::map<Vertex, int> load;
  for (std::uint64_t id = 1; id <= 12; ++id) {
    Vertex x = static_cast<Vertex>(rng.below(h.n())), y = static_cast<Vertex>(rng.below(h.n()));
    if (x == y || load[x] >= 2 || load[y] >= 2) continue;
    ++load[x];
    ++load[y];
    auto ca = a.reroute_step({{x, y, id}}, {});
    RouterUpdate up;
    up.dplus.push_back({x, y, id});
    auto cb = b.update(up);
    CHECK(ca == cb);
  }
  for (auto [id, pr] : a.demand()) CHECK(a.get_path(id) == b.get_path(id));

  // After a prune, pending changes block path queries until the reroute.
  Embedding sub = subdivided_embedding(h, 6, 2);
  std::vector<DemandPair> dem{{0, 5, 1}, {2, 11, 2}, {16, 3, 3}};
  EmbedRouter r(sub, dem, 2, opt);
  std::uint64_t k = *sub.host.edges.begin();
  r.prune_step(static_cast<Vertex>(k >> 32), static_cast<Vertex>(k & 0xffffffffu));
  std::vector<DemandPair> drop;
  for (auto [id, pr] : r.demand())
    if (!r.pruner().host_alive(pr.a) || !r.pruner().host_alive(pr.b)) drop.push_back(pr);
  if (r.pending()) CHECK_THROWS(r.get_path(1));
  r.reroute_step({}, drop);
  CHECK_FALSE(r.pending());
  for (auto [id, pr] : r.demand()) {
    Path p = r.get_path(id);
    CHECK(p.front() == pr.a);
    CHECK(p.back() == pr.b);
    CHECK(r.pruner().host_path_valid(p));
  }
}
