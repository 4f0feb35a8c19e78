#include "shc/lowerbound.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace shc {

std::uint64_t HardFamilySpec::hard_size(int m) const {
  return static_cast<std::uint64_t>(k) << ((m - d0) / 2);
}

namespace {

struct Builder {
  const Universe& u;
  const HardFamilySpec& spec;
  VertexTrie& live;
  std::vector<HardLevel>& levels;
  // (flat cluster, i*k+j) -> position in child j for each position in child i
  std::map<std::pair<std::uint32_t, int>, std::vector<std::uint32_t>> perms;
  // (hard vertex, depth) whose edges to siblings other than child 0 are left out
  std::vector<std::pair<Vertex, int>> cut_off;

  void fill(Cluster c, std::vector<Vertex>* out) {
    Vertex lo = u.first_vertex(c);
    Vertex hi = lo + static_cast<Vertex>(u.full_size(c));
    for (Vertex v = lo; v < hi; ++v) {
      live.insert(v);
      if (out) out->push_back(v);
    }
  }

  Cluster descend(Cluster c, int depth) const {
    while (c.depth < depth) c = u.child(c, 0);
    return c;
  }

  std::vector<Vertex> build(Cluster c, bool bad) {
    int m = u.d() - c.depth;
    std::size_t at = levels.size();
    levels.push_back({m, c, bad, 0, 0});
    std::vector<Vertex> hard;
    if (bad && m == spec.d0) {
      // A k-clique: one full bottom cluster under child 0.
      fill(descend(u.child(c, 0), u.d() - 1), &hard);
      fill(u.child(c, 1), nullptr);
    } else if (bad) {
      std::uint64_t cliques = spec.hard_size(m - 1) / static_cast<std::uint64_t>(spec.k);
      if (cliques > static_cast<std::uint64_t>(spec.k))
        throw std::invalid_argument("level " + std::to_string(m) + " needs " + std::to_string(cliques) +
                                    " cliques but only k fit");
      Cluster q = descend(u.child(c, 0), u.d() - 2);
      std::vector<Vertex> a;
      for (std::uint64_t i = 0; i < cliques; ++i) fill(u.child(q, static_cast<int>(i)), &a);
      std::vector<Vertex> h1 = build(u.child(c, 1), false);
      if (h1.size() != a.size()) throw std::logic_error("hard family size mismatch");
      match_prefix(c, a, h1);
      hard = a;
      hard.insert(hard.end(), h1.begin(), h1.end());
    } else {
      hard = build(u.child(c, 0), true);
      for (int j = 1; j < spec.k; ++j) fill(u.child(c, j), nullptr);
      for (Vertex h : hard) cut_off.emplace_back(h, c.depth);
    }
    std::sort(hard.begin(), hard.end());
    levels[at].hard = hard.size();
    return hard;
  }

  // Matching between children 0 and 1 of c pairing a[i] with b[i]; the rest
  // pair up in increasing order.
  void match_prefix(Cluster c, const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
    Vertex b0 = u.first_vertex(u.child(c, 0));
    Vertex b1 = u.first_vertex(u.child(c, 1));
    auto m = static_cast<std::uint32_t>(u.full_size(u.child(c, 0)));
    std::vector<std::uint32_t> perm(m, ~0u);
    std::vector<std::uint8_t> used(m, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      perm[a[i] - b0] = b[i] - b1;
      used[b[i] - b1] = 1;
    }
    std::uint32_t next = 0;
    for (std::uint32_t q = 0; q < m; ++q) {
      if (perm[q] != ~0u) continue;
      while (used[next]) ++next;
      perm[q] = next;
      used[next] = 1;
    }
    perms[{u.flat(c), 1}] = std::move(perm);
  }
};

}  // namespace

HardInstance build_hard_instance(int k, int d, int d0, Tau tau, std::uint64_t size_guard) {
  if (k < 2) throw std::invalid_argument("hard family needs k >= 2");
  if (d0 < 2) throw std::invalid_argument("hard family needs d0 >= 2");
  if (d < d0) throw std::invalid_argument("hard family needs d >= d0");
  if (tau.den == 0 || tau.num >= tau.den || tau.num * static_cast<std::uint64_t>(k) < tau.den)
    throw std::invalid_argument("hard family needs 1/k <= tau < 1");

  HardInstance h;
  h.spec = {k, d, d0, tau};
  h.g = SemiHypercube{Universe(k, d, size_guard)};
  const Universe& u = h.g.universe();
  h.live = VertexTrie(u, false);
  Builder b{u, h.spec, h.live, h.levels, {}, {}};
  h.hard = b.build(u.root(), h.spec.is_bad(d));

  for (int depth = 0; depth < d; ++depth) {
    std::uint32_t m = u.pow(d - depth - 1);
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          Vertex bi = u.first_vertex(u.child(c, i));
          Vertex bj = u.first_vertex(u.child(c, j));
          auto it = b.perms.find({u.flat(c), i * k + j});
          for (std::uint32_t q = 0; q < m; ++q)
            h.g.set_partner(bi + q, bj + (it == b.perms.end() ? q : it->second[q]));
        }
    }
  }
  h.g.check_matchings();
  for (auto [v, depth] : b.cut_off)
    for (int j = 1; j < k; ++j) h.removed.insert(edge_key(v, h.g.partner(v, depth, j)));

  std::vector<std::uint8_t> is_hard(u.n(), 0);
  for (Vertex v : h.hard) is_hard[v] = 1;
  for (HardLevel& lv : h.levels) {
    std::uint64_t cut = 0;
    h.live.for_each(lv.cluster, [&](Vertex v) {
      if (!is_hard[v]) return;
      for (int depth = lv.cluster.depth; depth < d; ++depth)
        for (int i = 0; i < k; ++i) {
          Vertex w = h.g.partner(v, depth, i);
          if (w == kNoVertex || !h.live.contains(w) || is_hard[w] || h.removed.count(edge_key(v, w))) continue;
          ++cut;
        }
    });
    lv.cut = cut;
  }
  return h;
}

std::uint64_t instance_degree(const HardInstance& h, Vertex v) {
  std::uint64_t deg = 0;
  for (int depth = 0; depth < h.spec.d; ++depth)
    for (int i = 0; i < h.spec.k; ++i) {
      Vertex w = h.g.partner(v, depth, i);
      if (w == kNoVertex || !h.live.contains(w) || h.removed.count(edge_key(v, w))) continue;
      ++deg;
    }
  return deg;
}

std::uint64_t measured_cut(const HardInstance& h) { return h.levels.empty() ? 0 : h.levels.front().cut; }

HardDemand hard_demand(const HardInstance& h) {
  const Universe& u = h.g.universe();
  std::vector<std::uint8_t> is_hard(u.n(), 0);
  for (Vertex v : h.hard) is_hard[v] = 1;
  std::vector<Vertex> rest;
  h.live.for_each(u.root(), [&](Vertex v) {
    if (!is_hard[v]) rest.push_back(v);
  });
  HardDemand out;
  out.cut = measured_cut(h);
  std::size_t at = 0;
  std::uint64_t used = 0;
  std::uint64_t id = 0;
  for (Vertex v : h.hard) {
    std::uint64_t want = instance_degree(h, v);
    for (std::uint64_t t = 0; t < want; ++t) {
      while (at < rest.size() && used >= instance_degree(h, rest[at])) {
        ++at;
        used = 0;
      }
      if (at == rest.size()) return out;
      out.pairs.push_back({v, rest[at], id++});
      ++used;
      ++out.crossing;
    }
  }
  return out;
}

}  // namespace shc
