#include "shc/prune.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

namespace shc {

ReferencePruner::ReferencePruner(const SemiHypercube& g, Tau tau, PrunerOptions opt)
    : g_(&g), tau_(tau), k_(g.k()), d_(g.d()), rho_(0), live_(g.universe()) {
  if (opt.mode == Mode::Strict) {
    tau_.strict_mode = true;
    tau_.check(d_);
    rho_ = reference_rho(k_, d_, tau_);
  } else {
    tau_.strict_mode = false;
    rho_ = opt.rho ? *opt.rho : reference_rho(k_, d_, tau_);
  }
  std::uint32_t nc = g.universe().cluster_count();
  target_.assign(nc, k_ - 1);
  marks_.assign(nc, {});
  epoch_kprime_.assign(nc, k_ - 1);
}

void ReferencePruner::mark(Cluster c, const std::vector<Vertex>& add) {
  const Universe& u = g_->universe();
  while (true) {
    std::uint32_t f = u.flat(c);
    marks_[f].insert(add.begin(), add.end());
    if (!is_degenerate(live_, c)) return;
    c = u.child(c, target_[f]);
  }
}

std::vector<Vertex> ReferencePruner::low_degree(Cluster parent, int child, int kprime, bool skip_marked) const {
  const Universe& u = g_->universe();
  Cluster c = u.child(parent, child);
  const auto& have = marks_[u.flat(c)];
  std::vector<Vertex> out;
  live_.for_each(c, [&](Vertex v) {
    if (skip_marked && have.count(v)) return;
    if (20 * cluster_degree(*g_, live_, v, parent.depth) < 19 * kprime) out.push_back(v);
  });
  return out;
}

void ReferencePruner::retarget(Cluster c) {
  const Universe& u = g_->universe();
  std::uint32_t f = u.flat(c);
  std::vector<int> S;
  for (int i = 0; i < k_; ++i)
    if (!live_.empty(u.child(c, i))) S.push_back(i);
  if (S.empty()) return;
  if (S.size() == 1) {
    target_[f] = S[0];
    epoch_kprime_[f] = -1;
    std::vector<Vertex> pass(marks_[f].begin(), marks_[f].end());
    mark(u.child(c, S[0]), pass);
    return;
  }
  int best = -1;
  if (S.size() % static_cast<std::size_t>(2 * d_ + 1) == 1) {
    std::uint32_t best_size = 0;
    for (int i : S) {
      std::uint32_t sz = live_.size(u.child(c, i));
      if (best < 0 || sz < best_size) {
        best = i;
        best_size = sz;
      }
    }
  } else {
    std::size_t best_marks = 0;
    const auto& m = marks_[f];
    for (int i : S) {
      Cluster ch = u.child(c, i);
      std::uint32_t lo = u.first_vertex(ch);
      std::uint32_t hi = lo + static_cast<std::uint32_t>(u.full_size(ch));
      auto cnt = static_cast<std::size_t>(std::distance(m.lower_bound(lo), m.lower_bound(hi)));
      if (best < 0 || cnt > best_marks) {
        best = i;
        best_marks = cnt;
      }
    }
  }
  target_[f] = best;
  int kprime = static_cast<int>(S.size()) - 1;
  epoch_kprime_[f] = kprime;
  mark(u.child(c, best), low_degree(c, best, kprime, false));
}

Vertex ReferencePruner::trim(Cluster c) {
  const Universe& u = g_->universe();
  if (live_.empty(c)) throw EmptyClusterError("trim on empty cluster '" + u.label(c) + "'");
  if (c.depth == d_) {
    Vertex v = c.prefix;
    for (int depth = 0; depth <= d_; ++depth) marks_[u.flat(u.ancestor(v, depth))].erase(v);
    live_.remove(v);
    return v;
  }
  std::uint32_t f = u.flat(c);
  Vertex v = trim(u.child(c, target_[f]));
  if (live_.empty(u.child(c, target_[f]))) retarget(c);
  return v;
}

std::vector<Vertex> ReferencePruner::remove(Vertex v) {
  const Universe& u = g_->universe();
  if (!live_.contains(v)) throw NotPresentError("delete of absent vertex " + u.label(v));
  for (int depth = 0; depth <= d_; ++depth) marks_[u.flat(u.ancestor(v, depth))].erase(v);
  live_.remove(v);
  std::vector<Vertex> pruned;
  for (int depth = d_ - 1; depth >= 0; --depth) {
    Cluster c = u.ancestor(v, depth);
    std::uint32_t f = u.flat(c);
    if (live_.empty(u.child(c, target_[f]))) {
      retarget(c);
    } else {
      int kprime = 0;
      for (int j = 0; j < k_; ++j)
        if (j != target_[f] && !live_.empty(u.child(c, j))) ++kprime;
      mark(u.child(c, target_[f]), low_degree(c, target_[f], kprime, true));
    }
    std::uint64_t want = rho_ > std::numeric_limits<std::uint64_t>::max() / (pruned.size() + 1)
                             ? std::numeric_limits<std::uint64_t>::max()
                             : rho_ * (pruned.size() + 1);
    std::uint64_t cou = std::min<std::uint64_t>(want, live_.size(c));
    for (std::uint64_t t = 0; t < cou && !live_.empty(c); ++t) pruned.push_back(trim(c));
  }
  return pruned;
}

}  // namespace shc
