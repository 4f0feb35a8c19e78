#include "shc/prune.hpp"

#include <algorithm>
#include <limits>

namespace shc {

namespace {

std::uint64_t ceil_to_u64(const Rational& r) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  cpp_int q = num / den;
  if (q * den != num) ++q;
  if (q > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("rho exceeds 64 bits");
  return q.convert_to<std::uint64_t>();
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return p > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                       : static_cast<std::uint64_t>(p);
}

}  // namespace

Rational harmonic(int k) {
  Rational h = 0;
  for (int i = 1; i <= k; ++i) h += Rational(1, i);
  return h;
}

std::uint64_t strict_rho(int k, int d, const Tau& tau) {
  Rational r = 2 * harmonic(k) * (2 * d + 1) * Rational(tau.den, tau.num);
  return ceil_to_u64(r);
}

std::uint64_t reference_rho(int k, int d, const Tau& tau) {
  Rational r = 3 * d * harmonic(k) * Rational(tau.den, tau.num);
  return ceil_to_u64(r);
}

std::uint64_t pruning_ratio_bound(std::uint64_t rho, int d) {
  std::uint64_t p = 1;
  for (int i = 0; i < d; ++i) p = sat_mul(p, rho == std::numeric_limits<std::uint64_t>::max() ? rho : rho + 1);
  return p == std::numeric_limits<std::uint64_t>::max() ? p : p - 1;
}

Pruner::Pruner(const SemiHypercube& g, Tau tau, PrunerOptions opt)
    : g_(&g), tau_(tau), opt_(opt), k_(g.k()), d_(g.d()), rcycle_(2 * g.d() + 1), rho_(0),
      live_(g.universe()) {
  if (opt_.mode == Mode::Strict) {
    tau_.strict_mode = true;
    tau_.check(d_);
    if (opt_.rho) throw std::invalid_argument("strict mode derives rho; override needs experimental mode");
    rho_ = strict_rho(k_, d_, tau_);
  } else {
    tau_.strict_mode = false;
    rho_ = opt_.rho ? *opt_.rho : strict_rho(k_, d_, tau_);
  }
  std::uint32_t nc = universe().cluster_count();
  target_.assign(nc, 0);
  s_.assign(static_cast<std::size_t>(nc) * static_cast<std::size_t>(k_), 1);
  s_count_.assign(nc, k_ - 1);
  for (std::uint32_t c = 0; c < nc; ++c) s_[static_cast<std::size_t>(c) * static_cast<std::size_t>(k_)] = 0;
  minfo_.assign(nc, MarkInfo{});
}

std::uint64_t Pruner::key(Cluster c, int anc_depth, int j) const {
  return (static_cast<std::uint64_t>(universe().flat(c)) * static_cast<std::uint64_t>(d_) +
          static_cast<std::uint64_t>(anc_depth)) * static_cast<std::uint64_t>(k_) +
         static_cast<std::uint64_t>(j);
}

std::set<Vertex>& Pruner::shadow_mut(Cluster c, int anc_depth, int j) { return shadow_[key(c, anc_depth, j)]; }

const std::set<Vertex>& Pruner::shadow(Cluster c, int anc_depth, int j) const {
  static const std::set<Vertex> kEmpty;
  if (anc_depth < 0 || j <= 0 || j >= k_) return kEmpty;
  auto it = shadow_.find(key(c, anc_depth, j));
  return it == shadow_.end() ? kEmpty : it->second;
}

std::size_t Pruner::shadow_size(Cluster c, MarkInfo m) const { return shadow(c, m.anc_depth, m.j).size(); }

std::size_t Pruner::marked_count(Cluster c) const { return shadow_size(c, minfo(c)); }

void Pruner::process_removal(Vertex x) {
  const Universe& u = universe();
  if (!live_.contains(x)) throw NotPresentError("process_removal on absent vertex " + u.label(x));
  for (int depth = 0; depth < d_; ++depth) {
    for (int i = 0; i < k_; ++i) {
      if (i == u.digit(x, depth)) continue;
      Vertex y = g_->partner(x, depth, i);
      if (!live_.contains(y)) continue;
      // y's degree toward its siblings inside the lcp cluster, before x goes.
      int deg = cluster_degree(*g_, live_, y, depth);
      for (int dd = depth + 1; dd <= d_; ++dd) shadow_mut(u.ancestor(y, dd), depth, deg).insert(y);
    }
  }
  // x leaves every shadow set it belongs to.
  for (int depth = 0; depth < d_; ++depth) {
    int deg = cluster_degree(*g_, live_, x, depth);
    for (int j = deg + 1; j < k_; ++j)
      for (int dd = depth + 1; dd <= d_; ++dd) {
        auto it = shadow_.find(key(u.ancestor(x, dd), depth, j));
        if (it != shadow_.end()) it->second.erase(x);
      }
  }
  live_.remove(x);
}

void Pruner::retarget(Cluster c) {
  const Universe& u = universe();
  std::uint32_t f = u.flat(c);
  std::uint8_t* s = &s_[static_cast<std::size_t>(f) * static_cast<std::size_t>(k_)];
  while (s_count_[f] > 0 && live_.empty(u.child(c, target_[f]))) {
    if (s_count_[f] == 1) {
      int i = static_cast<int>(std::find(s, s + k_, 1) - s);
      target_[f] = i;
      minfo_[u.flat(u.child(c, i))] = minfo_[f];
    } else {
      int best = -1;
      if (s_count_[f] % rcycle_ == 1) {
        std::uint32_t best_size = 0;
        for (int i = 0; i < k_; ++i) {
          if (!s[i]) continue;
          std::uint32_t sz = live_.size(u.child(c, i));
          if (best < 0 || sz < best_size) {
            best = i;
            best_size = sz;
          }
        }
      } else {
        std::size_t best_marks = 0;
        for (int i = 0; i < k_; ++i) {
          if (!s[i]) continue;
          std::size_t m = shadow_size(u.child(c, i), minfo_[f]);
          if (best < 0 || m > best_marks) {
            best = i;
            best_marks = m;
          }
        }
      }
      target_[f] = best;
      // ceil(19/20 * (|S| - 1))
      int j = (19 * (s_count_[f] - 1) + 19) / 20;
      minfo_[u.flat(u.child(c, best))] = MarkInfo{c.depth, j};
    }
    s[target_[f]] = 0;
    --s_count_[f];
  }
}

Vertex Pruner::trim(Cluster c) {
  const Universe& u = universe();
  if (live_.empty(c)) throw EmptyClusterError("trim on empty cluster '" + u.label(c) + "'");
  if (c.depth == d_) {
    process_removal(c.prefix);
    return c.prefix;
  }
  Vertex v = trim(u.child(c, target_[u.flat(c)]));
  retarget(c);
  return v;
}

std::vector<Vertex> Pruner::remove(Vertex v) {
  const Universe& u = universe();
  if (!live_.contains(v)) throw NotPresentError("delete of absent vertex " + u.label(v));
  process_removal(v);
  std::vector<Vertex> pruned;
  for (int depth = d_ - 1; depth >= 0; --depth) {
    Cluster c = u.ancestor(v, depth);
    retarget(c);
    std::uint64_t want = sat_mul(rho_, pruned.size() + 1);
    std::uint64_t cou = std::min<std::uint64_t>(want, live_.size(c));
    for (std::uint64_t t = 0; t < cou && !live_.empty(c); ++t) pruned.push_back(trim(c));
  }
  if (opt_.mode == Mode::Strict && pruned.size() > pruning_ratio_bound(rho_, d_))
    throw InvariantError("pruning ratio bound exceeded");
  return pruned;
}

}  // namespace shc
