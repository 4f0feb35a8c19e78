#include "shc/route.hpp"

#include <algorithm>

namespace shc {

std::optional<Path> greedy_path(const SemiHypercube& g, const VertexTrie& live, Vertex s, Vertex t) {
  if (!live.contains(s) || !live.contains(t)) throw NotPresentError("greedy endpoint not present");
  const Universe& u = g.universe();
  Path p{s};
  while (s != t) {
    int depth = u.lcp_depth(s, t);
    Vertex next = g.partner(s, depth, u.digit(t, depth));
    if (!live.contains(next)) return std::nullopt;
    p.push_back(next);
    s = next;
  }
  return p;
}

ReachSet reach_set_oracle(const SemiHypercube& g, const VertexTrie& live, Vertex t, Cluster c) {
  ReachSet r{t, c, {}};
  live.for_each(c, [&](Vertex s) {
    if (greedy_path(g, live, s, t)) r.members.push_back(s);
  });
  return r;
}

namespace {

void append(Path& out, const Path& tail) {
  // tail starts where out ends.
  out.insert(out.end(), tail.begin() + 1, tail.end());
}

Path reversed(Path p) {
  std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace

SampledPath sample_noncritical_path(const SemiHypercube& g, const VertexTrie& live, Vertex s,
                                    Vertex t, Rng& rng) {
  if (!live.contains(s) || !live.contains(t)) throw NotPresentError("endpoint not present");
  for (int attempt = 1; attempt <= kNoncriticalAttemptCap; ++attempt) {
    Vertex v = live.sample(live.universe().root(), rng);
    auto to_s = greedy_path(g, live, v, s);
    if (!to_s) continue;
    auto to_t = greedy_path(g, live, v, t);
    if (!to_t) continue;
    Path p = reversed(*to_s);
    append(p, *to_t);
    return {p, attempt};
  }
  throw SamplingFailure("noncritical sampler exceeded attempt cap");
}

namespace {

Path escape_impl(const SemiHypercube& g, const VertexTrie& live, const Tau& tau, Vertex s,
                 Cluster rep_root, Rng& rng, EscapeTrace* trace, int depth_left) {
  const Universe& u = g.universe();
  Cluster home = home_cluster(live, tau, s);
  if (trace) trace->isolation.push_back(isolation(live, tau, s));
  if (representative(live, home) == rep_root) return {s};
  if (depth_left <= 0) throw SamplingFailure("escape recursion exceeded d(d+1)/2");
  // Deepest non-degenerate strict ancestor of home.
  Cluster anc = u.parent(home);
  while (anc.depth > 0 && is_degenerate(live, anc)) anc = u.parent(anc);
  if (is_degenerate(live, anc)) throw SamplingFailure("no non-degenerate ancestor of home cluster");
  std::vector<int> S;
  for (int i = 0; i < u.k(); ++i) {
    Cluster ch = u.child(anc, i);
    if (!live.empty(ch) && !is_tau_critical(live, ch, tau)) S.push_back(i);
  }
  if (S.empty()) throw SamplingFailure("escape: no nonempty noncritical sibling");
  int home_iso = cluster_isolation(live, tau, home);
  int cap = escape_attempt_cap(u.k());
  for (int attempt = 0; attempt < cap; ++attempt) {
    if (trace) ++trace->attempts;
    Vertex x = live.sample(home, rng);
    int i = S[rng.below(S.size())];
    if (i == u.digit(x, anc.depth)) continue;
    Vertex y = g.partner(x, anc.depth, i);
    if (!live.contains(y)) continue;
    auto back = greedy_path(g, live, x, s);
    if (!back) continue;
    if (isolation(live, tau, y) >= home_iso) continue;
    Path p = reversed(*back);
    p.push_back(y);
    append(p, escape_impl(g, live, tau, y, rep_root, rng, trace, depth_left - 1));
    return p;
  }
  throw SamplingFailure("escape exceeded attempt cap");
}

}  // namespace

Path escape(const SemiHypercube& g, const VertexTrie& live, const Tau& tau, Vertex s, Rng& rng,
            EscapeTrace* trace) {
  if (!live.contains(s)) throw NotPresentError("escape start not present");
  Cluster rep_root = representative(live, live.universe().root());
  return escape_impl(g, live, tau, s, rep_root, rng, trace, max_isolation(g.d()));
}

SamplePathResult sample_path(const SemiHypercube& g, const VertexTrie& live, const Tau& tau,
                             Vertex s, Vertex t, Rng& rng) {
  SamplePathResult r;
  Path p0 = escape(g, live, tau, s, rng, &r.escape_s);
  Path p3 = reversed(escape(g, live, tau, t, rng, &r.escape_t));
  Vertex s2 = p0.back();
  Vertex t2 = p3.front();
  for (int attempt = 1; attempt <= kNoncriticalAttemptCap; ++attempt) {
    Vertex v = live.sample(live.universe().root(), rng);
    auto to_s = greedy_path(g, live, v, s2);
    if (!to_s) continue;
    auto to_t = greedy_path(g, live, v, t2);
    if (!to_t) continue;
    r.midpoint_attempts = attempt;
    r.path = p0;
    append(r.path, reversed(*to_s));
    append(r.path, *to_t);
    append(r.path, p3);
    return r;
  }
  throw SamplingFailure("sample_path exceeded midpoint attempt cap");
}

bool path_is_valid(const SemiHypercube& g, const VertexTrie& live, const Path& p,
                   const EdgeSet* removed) {
  if (p.empty()) return false;
  for (Vertex v : p)
    if (!live.contains(v)) return false;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!g.adjacent(p[i - 1], p[i])) return false;
    if (removed && removed->count(edge_key(p[i - 1], p[i]))) return false;
  }
  return true;
}

void CongestionMap::add(const Path& p) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    std::uint64_t& c = count[edge_key(p[i - 1], p[i])];
    ++c;
    ++total;
    max = std::max(max, c);
  }
}

CongestionMap measure_congestion(const std::vector<Path>& paths) {
  CongestionMap m;
  for (const Path& p : paths) m.add(p);
  return m;
}

}  // namespace shc
