#include "shc/dynroute.hpp"

#include <algorithm>
#include <limits>

namespace shc {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return p > kSat ? kSat : static_cast<std::uint64_t>(p);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSat - b ? kSat : a + b; }

template <class Map>
std::size_t total_size(const std::vector<Map>& v) {
  std::size_t s = 0;
  for (const auto& m : v) s += m.size();
  return s;
}

}  // namespace

bool demand_load_ok(const std::vector<DemandPair>& demand, std::uint64_t L) {
  std::unordered_map<Vertex, std::uint64_t> load;
  for (const DemandPair& p : demand) {
    if (++load[p.a] > L) return false;
    if (++load[p.b] > L) return false;
  }
  return true;
}

bool routable(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed, const Tau& tau) {
  if (!validate(g, live, tau, &removed).valid) return false;
  const Universe& u = g.universe();
  int k = u.k();
  for (int depth = 0; depth < u.d(); ++depth) {
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      if (is_degenerate(live, c) || live.empty(c)) continue;
      std::vector<char> seen(static_cast<std::size_t>(k * k), 0);
      live.for_each(c, [&](Vertex v) {
        int i = u.digit(v, depth);
        for (int j = i + 1; j < k; ++j) {
          Vertex w = g.partner(v, depth, j);
          if (live.contains(w) && !removed.count(edge_key(v, w))) seen[static_cast<std::size_t>(i * k + j)] = 1;
        }
      });
      for (int i = 0; i < k; ++i) {
        if (live.empty(u.child(c, i))) continue;
        for (int j = i + 1; j < k; ++j)
          if (!live.empty(u.child(c, j)) && !seen[static_cast<std::size_t>(i * k + j)]) return false;
      }
    }
  }
  return true;
}

DynamicRouter::DynamicRouter(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed,
                             const std::vector<DemandPair>& demand, Tau tau, std::uint64_t L, Mode mode)
    : g_(&g), tau_(tau), L_(L), mode_(mode), k_(g.k()), d_(g.d()), live_(live), removed_(removed) {
  const Universe& u = g.universe();
  if (mode_ == Mode::Strict) {
    if (tau_.num == 0 || tau_.num * 4 > tau_.den) throw ContractError("router needs tau <= 1/4");
    if (!routable(g, live_, removed_, tau_)) throw ContractError("graph is not routable at this tau");
  }
  PairMap init;
  for (const DemandPair& p : demand) {
    if (!live_.contains(p.a) || !live_.contains(p.b)) throw ContractError("demand endpoint not present");
    if (!root_demand_.emplace(p.id, p).second) throw ContractError("duplicate demand id");
    init.emplace(RecursiveId{p.id, 0, 0}, Pair{p.a, p.b});
  }
  if (!demand_load_ok(demand, L_)) throw ContractError("demand load exceeds L");

  std::size_t inner = u.cluster_count() - u.n();
  nodes_.resize(inner);
  for (auto& nd : nodes_) nd.split.resize(static_cast<std::size_t>(k_ * k_));
  ovf_.resize(inner * static_cast<std::size_t>(k_));
  dir_.resize(inner * static_cast<std::size_t>(k_ * k_));

  // Buckets first: every live edge of every cluster.
  std::vector<std::set<std::uint64_t>> ovf_edges(ovf_.size());
  std::vector<std::set<std::uint64_t>> dir_edges(dir_.size());
  for (Vertex v = 0; v < u.n(); ++v) {
    if (!live_.contains(v)) continue;
    for (int depth = 0; depth < d_; ++depth) {
      int i = u.digit(v, depth);
      for (int j = i + 1; j < k_; ++j) {
        Vertex w = g.partner(v, depth, j);
        std::uint64_t key = edge_key(v, w);
        if (!edge_live(key)) continue;
        std::uint32_t f = u.flat(u.ancestor(v, depth));
        ovf_edges[f * static_cast<std::size_t>(k_) + static_cast<std::size_t>(i)].insert(key);
        ovf_edges[f * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j)].insert(key);
        dir_edges[f * static_cast<std::size_t>(k_ * k_) + static_cast<std::size_t>(i * k_ + j)].insert(key);
      }
    }
  }
  for (std::size_t x = 0; x < ovf_.size(); ++x)
    if (!ovf_edges[x].empty()) ovf_[x].update({}, {}, ovf_edges[x], {});
  for (std::size_t x = 0; x < dir_.size(); ++x)
    if (!dir_edges[x].empty()) dir_[x].update({}, {}, dir_edges[x], {});

  rec_update(u.root(), {}, {}, init, {});
}

bool DynamicRouter::edge_live(std::uint64_t key) const {
  return live_.contains(edge_lo(key)) && live_.contains(edge_hi(key)) && !removed_.count(key);
}

std::uint64_t DynamicRouter::level_load(int depth) const {
  std::uint64_t x = std::max<std::uint64_t>(static_cast<std::uint64_t>(k_), L_);
  for (int i = 0; i < depth; ++i) x = sat_mul(x, 20);
  return x;
}

std::uint64_t DynamicRouter::length_bound() const {
  std::uint64_t x = 1;
  for (int i = 0; i < d_; ++i) x = sat_mul(x, 4);
  return x;
}

std::int64_t DynamicRouter::threshold_for(int depth, std::size_t edges) const {
  __int128 Ld = level_load(depth);
  __int128 m = g_->universe().pow(d_ - depth - 1);
  __int128 t = 4 * Ld * static_cast<__int128>(edges) - Ld * m;
  if (t < 0) return 0;
  if (t > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(t);
}

std::int64_t DynamicRouter::threshold(Cluster c, int i, int j) const {
  if (i > j) std::swap(i, j);
  return threshold_for(c.depth, dir_lb(c, i, j).bucket_count());
}

DynamicRouter::Node& DynamicRouter::node(Cluster c) { return nodes_[g_->universe().flat(c)]; }

const DynamicRouter::Node* DynamicRouter::find_node(Cluster c) const {
  std::uint32_t f = g_->universe().flat(c);
  return f < nodes_.size() ? &nodes_[f] : nullptr;
}

DynamicRouter::Balancer& DynamicRouter::ovf_lb(Cluster c, int i) {
  return ovf_[g_->universe().flat(c) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(i)];
}
const DynamicRouter::Balancer& DynamicRouter::ovf_lb(Cluster c, int i) const {
  return ovf_[g_->universe().flat(c) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(i)];
}
DynamicRouter::Balancer& DynamicRouter::dir_lb(Cluster c, int i, int j) {
  return dir_[g_->universe().flat(c) * static_cast<std::size_t>(k_ * k_) + static_cast<std::size_t>(i * k_ + j)];
}
const DynamicRouter::Balancer& DynamicRouter::dir_lb(Cluster c, int i, int j) const {
  return dir_[g_->universe().flat(c) * static_cast<std::size_t>(k_ * k_) + static_cast<std::size_t>(i * k_ + j)];
}

DynamicRouter::Pair DynamicRouter::orient(std::uint64_t key, Cluster ch) const {
  Vertex lo = edge_lo(key);
  Vertex hi = edge_hi(key);
  return g_->universe().contains(ch, lo) ? Pair{lo, hi} : Pair{hi, lo};
}

std::size_t DynamicRouter::base_size(Cluster c, int i, int j) const {
  if (i > j) std::swap(i, j);
  return nodes_[g_->universe().flat(c)].split[static_cast<std::size_t>(i * k_ + j)].base.size();
}

std::size_t DynamicRouter::overflow_size(Cluster c, int i, int j) const {
  if (i > j) std::swap(i, j);
  return nodes_[g_->universe().flat(c)].split[static_cast<std::size_t>(i * k_ + j)].ovf.size();
}

std::set<RecursiveId> DynamicRouter::rec_update(Cluster c, const EdgeLists& ep, const EdgeLists& em,
                                                const PairMap& dp, const PairMap& dm) {
  const Universe& u = g_->universe();
  Node& nd = node(c);
  const std::size_t K = static_cast<std::size_t>(k_);
  auto ch = [&](Vertex v) { return u.digit(v, c.depth); };
  auto pij = [&](int i, int j) { return static_cast<std::size_t>(std::min(i, j)) * K + static_cast<std::size_t>(std::max(i, j)); };

  static const std::vector<std::uint64_t> kNone;
  auto fp = ep.find(u.flat(c));
  auto fm = em.find(u.flat(c));
  const auto& eplus = fp == ep.end() ? kNone : fp->second;
  const auto& eminus = fm == em.end() ? kNone : fm->second;
  std::vector<std::set<std::uint64_t>> epij(K * K), emij(K * K), epi(K), emi(K);
  for (std::uint64_t key : eplus) {
    int i = ch(edge_lo(key)), j = ch(edge_hi(key));
    epij[pij(i, j)].insert(key);
    epi[static_cast<std::size_t>(i)].insert(key);
    epi[static_cast<std::size_t>(j)].insert(key);
  }
  for (std::uint64_t key : eminus) {
    int i = ch(edge_lo(key)), j = ch(edge_hi(key));
    emij[pij(i, j)].insert(key);
    emi[static_cast<std::size_t>(i)].insert(key);
    emi[static_cast<std::size_t>(j)].insert(key);
  }

  // Step 1: base / overflow split.
  for (const auto& [id, p] : dm)
    if (!nd.demand.erase(id)) throw std::logic_error("router: removing unknown recursive demand");
  for (const auto& [id, p] : dp)
    if (!nd.demand.emplace(id, p).second) throw std::logic_error("router: duplicate recursive demand");
  auto old_pair = [&](const RecursiveId& id) -> Pair {
    auto it = dm.find(id);
    return it != dm.end() ? it->second : nd.demand.at(id);
  };

  PairMap dir_plus, dir_minus;
  std::vector<std::set<RecursiveId>> dpij(K * K), dmij(K * K);
  for (const auto& [id, p] : dp) {
    if (ch(p.first) == ch(p.second)) dir_plus.emplace(id, p);
    else dpij[pij(ch(p.first), ch(p.second))].insert(id);
  }
  for (const auto& [id, p] : dm) {
    if (ch(p.first) == ch(p.second)) dir_minus.emplace(id, p);
    else dmij[pij(ch(p.first), ch(p.second))].insert(id);
  }
  std::vector<std::set<RecursiveId>> ovf_plus(K), ovf_minus(K);
  for (int i = 0; i < k_; ++i) {
    for (int j = i + 1; j < k_; ++j) {
      std::size_t x = pij(i, j);
      Split& s = nd.split[x];
      std::set<RecursiveId> ovfm, basem, basep, ovfp;
      for (const RecursiveId& id : dmij[x]) {
        if (s.ovf.erase(id)) ovfm.insert(id);
        else if (s.base.erase(id)) basem.insert(id);
        else throw std::logic_error("router: removed demand not in split");
      }
      std::size_t edges = dir_lb(c, i, j).bucket_count() + epij[x].size() - emij[x].size();
      std::int64_t T = threshold_for(c.depth, edges);
      std::int64_t rf = std::min<std::int64_t>(T - static_cast<std::int64_t>(s.base.size()),
                                               static_cast<std::int64_t>(s.ovf.size() + dpij[x].size()));
      if (rf >= 0) {
        std::set<RecursiveId> cand(s.ovf);
        cand.insert(dpij[x].begin(), dpij[x].end());
        auto it = cand.begin();
        for (std::int64_t t = 0; t < rf; ++t, ++it) {
          basep.insert(*it);
          if (s.ovf.count(*it)) ovfm.insert(*it);
        }
        for (const RecursiveId& id : dpij[x])
          if (!basep.count(id)) ovfp.insert(id);
      } else {
        auto it = s.base.begin();
        for (std::int64_t t = 0; t < -rf; ++t, ++it) {
          ovfp.insert(*it);
          basem.insert(*it);
        }
        ovfp.insert(dpij[x].begin(), dpij[x].end());
      }
      for (const RecursiveId& id : ovfm) s.ovf.erase(id);
      for (const RecursiveId& id : basem) {
        s.base.erase(id);
        dir_minus.emplace(id, old_pair(id));
      }
      for (const RecursiveId& id : basep) {
        s.base.insert(id);
        dir_plus.emplace(id, nd.demand.at(id));
      }
      s.ovf.insert(ovfp.begin(), ovfp.end());
      ovf_plus[static_cast<std::size_t>(i)].insert(ovfp.begin(), ovfp.end());
      ovf_plus[static_cast<std::size_t>(j)].insert(ovfp.begin(), ovfp.end());
      ovf_minus[static_cast<std::size_t>(i)].insert(ovfm.begin(), ovfm.end());
      ovf_minus[static_cast<std::size_t>(j)].insert(ovfm.begin(), ovfm.end());
    }
  }

  // Step 2: overflow leaves its endpoint clusters.
  std::vector<PairMap> cplus(K), cminus(K);
  auto add_sub = [&](std::vector<PairMap>& to, Vertex a, Vertex b, RecursiveId id) {
    if (!to[static_cast<std::size_t>(ch(a))].emplace(id, Pair{a, b}).second)
      throw std::logic_error("router: recursive id collision");
  };
  std::vector<Balancer::Result> res(K);
  std::set<RecursiveId> Iplus, Iminus;
  for (std::size_t i = 0; i < K; ++i) {
    if (ovf_plus[i].empty() && ovf_minus[i].empty() && epi[i].empty() && emi[i].empty()) continue;
    res[i] = ovf_[u.flat(c) * K + i].update(ovf_plus[i], ovf_minus[i], epi[i], emi[i]);
    Iplus.insert(res[i].added.begin(), res[i].added.end());
    Iminus.insert(res[i].removed.begin(), res[i].removed.end());
  }
  auto old_ovf_edge = [&](int side, const RecursiveId& id) {
    auto it = res[static_cast<std::size_t>(side)].previous.find(id);
    return it != res[static_cast<std::size_t>(side)].previous.end() ? it->second : ovf_lb(c, side).bucket_of(id);
  };
  for (const RecursiveId& id : Iminus) {
    auto [a, b] = old_pair(id);
    int i = ch(a), j = ch(b);
    auto [a1, c1] = orient(old_ovf_edge(i, id), u.child(c, i));
    auto [b1, d1] = orient(old_ovf_edge(j, id), u.child(c, j));
    add_sub(cminus, a, a1, id.child(1));
    add_sub(cminus, b1, b, id.child(1));
    if (!dir_minus.emplace(id, Pair{c1, d1}).second) throw std::logic_error("router: duplicate direct removal");
  }
  for (const RecursiveId& id : Iplus) {
    auto [a, b] = nd.demand.at(id);
    int i = ch(a), j = ch(b);
    auto [a1, c1] = orient(ovf_lb(c, i).bucket_of(id), u.child(c, i));
    auto [b1, d1] = orient(ovf_lb(c, j).bucket_of(id), u.child(c, j));
    add_sub(cplus, a, a1, id.child(1));
    add_sub(cplus, b1, b, id.child(1));
    if (!dir_plus.emplace(id, Pair{c1, d1}).second) throw std::logic_error("router: duplicate direct addition");
  }

  // Step 3: direct demand.
  for (const auto& [id, p] : dir_minus)
    if (!nd.dir.erase(id)) throw std::logic_error("router: unknown direct pair");
  for (const auto& [id, p] : dir_plus) nd.dir[id] = p;
  std::vector<std::set<RecursiveId>> ddp(K * K), ddm(K * K);
  for (const auto& [id, p] : dir_plus)
    if (ch(p.first) != ch(p.second)) ddp[pij(ch(p.first), ch(p.second))].insert(id);
  for (const auto& [id, p] : dir_minus)
    if (ch(p.first) != ch(p.second)) ddm[pij(ch(p.first), ch(p.second))].insert(id);

  std::set<RecursiveId> delta;
  for (int i = 0; i < k_; ++i) {
    for (int j = i + 1; j < k_; ++j) {
      std::size_t x = pij(i, j);
      if (ddp[x].empty() && ddm[x].empty() && epij[x].empty() && emij[x].empty()) continue;
      Balancer& lb = dir_lb(c, i, j);
      auto r = lb.update(ddp[x], ddm[x], epij[x], emij[x]);
      for (const RecursiveId& id : r.removed) {
        auto it = dir_minus.find(id);
        auto [a, b] = it != dir_minus.end() ? it->second : nd.dir.at(id);
        auto [a1, b1] = orient(r.previous.at(id), u.child(c, ch(a)));
        add_sub(cminus, a, a1, id.child(0));
        add_sub(cminus, b1, b, id.child(0));
        delta.insert(id);
      }
      for (const RecursiveId& id : r.added) {
        auto [a, b] = nd.dir.at(id);
        auto [a1, b1] = orient(lb.bucket_of(id), u.child(c, ch(a)));
        add_sub(cplus, a, a1, id.child(0));
        add_sub(cplus, b1, b, id.child(0));
        delta.insert(id);
      }
    }
  }
  for (const auto& [id, p] : dir_minus) {
    delta.insert(id);
    if (ch(p.first) == ch(p.second)) add_sub(cminus, p.first, p.second, id.child(0));
  }
  for (const auto& [id, p] : dir_plus) {
    delta.insert(id);
    if (ch(p.first) == ch(p.second)) add_sub(cplus, p.first, p.second, id.child(0));
  }

  ++stats_.calls;
  std::uint64_t lhs = total_size(cplus) + total_size(cminus);
  std::uint64_t rhs = sat_add(sat_mul(72, dp.size() + dm.size()),
                              sat_mul(sat_mul(320, level_load(c.depth)), eplus.size() + eminus.size()));
  if (lhs > rhs) {
    ++stats_.violations;
    stats_.worst_lhs = lhs;
    stats_.worst_rhs = rhs;
  }

  if (c.depth + 1 < d_) {
    for (int i = 0; i < k_; ++i) {
      Cluster sub = u.child(c, i);
      std::size_t si = static_cast<std::size_t>(i);
      bool edges_below = false;
      for (const auto* lists : {&ep, &em})
        for (const auto& [f, keys] : *lists) {
          if (keys.empty()) continue;
          Vertex any = edge_lo(keys.front());
          int depth = u.lcp_depth(edge_lo(keys.front()), edge_hi(keys.front()));
          if (depth > c.depth && u.contains(sub, any)) edges_below = true;
        }
      if (cplus[si].empty() && cminus[si].empty() && !edges_below) continue;
      for (const RecursiveId& id : rec_update(sub, ep, em, cplus[si], cminus[si])) delta.insert(id.parent());
    }
  }
  return delta;
}

std::set<std::uint64_t> DynamicRouter::update(const RouterUpdate& up) {
  const Universe& u = g_->universe();
  // Contract checks; nothing below mutates until they pass.
  std::set<Vertex> vm(up.vminus.begin(), up.vminus.end());
  std::set<Vertex> vp(up.vplus.begin(), up.vplus.end());
  for (Vertex v : vm)
    if (v >= u.n() || !live_.contains(v)) throw ContractError("removing absent vertex");
  for (Vertex v : vp)
    if (v >= u.n() || live_.contains(v)) throw ContractError("adding present vertex");
  std::set<std::uint64_t> em(up.eminus.begin(), up.eminus.end());
  std::set<std::uint64_t> epl(up.eplus.begin(), up.eplus.end());
  for (std::uint64_t key : em)
    if (edge_hi(key) >= u.n() || !g_->adjacent(edge_lo(key), edge_hi(key))) throw ContractError("not an edge");
  for (std::uint64_t key : epl) {
    if (edge_hi(key) >= u.n() || !g_->adjacent(edge_lo(key), edge_hi(key))) throw ContractError("not an edge");
    if (em.count(key)) throw ContractError("edge both added and removed");
  }
  std::map<std::uint64_t, DemandPair> next = root_demand_;
  PairMap dm_map, dp_map;
  for (const DemandPair& p : up.dminus) {
    auto it = next.find(p.id);
    if (it == next.end()) throw ContractError("removing unknown demand id");
    if (!(it->second == p)) throw ContractError("removed demand endpoints do not match");
    next.erase(it);
    dm_map.emplace(RecursiveId{p.id, 0, 0}, Pair{p.a, p.b});
  }
  VertexTrie live_next(live_);
  for (Vertex v : vm) live_next.remove(v);
  for (Vertex v : vp) live_next.insert(v);
  for (const DemandPair& p : up.dplus) {
    if (!next.emplace(p.id, p).second) throw ContractError("adding duplicate demand id");
    if (p.a >= u.n() || p.b >= u.n() || !live_next.contains(p.a) || !live_next.contains(p.b))
      throw ContractError("added demand endpoint not present");
    dp_map.emplace(RecursiveId{p.id, 0, 0}, Pair{p.a, p.b});
  }
  std::vector<DemandPair> all;
  for (const auto& [id, p] : next) {
    if (!live_next.contains(p.a) || !live_next.contains(p.b))
      throw ContractError("demand at removed vertex must be listed for removal");
    all.push_back(p);
  }
  if (!demand_load_ok(all, L_)) throw ContractError("demand load exceeds L");
  EdgeSet removed_next(removed_);
  for (std::uint64_t key : em) removed_next.insert(key);
  for (std::uint64_t key : epl) removed_next.erase(key);
  if (mode_ == Mode::Strict && !routable(*g_, live_next, removed_next, tau_))
    throw ContractError("update leaves a graph the router cannot serve");

  // Effective bucket changes.
  std::set<std::uint64_t> cand(em);
  cand.insert(epl.begin(), epl.end());
  for (const auto* vs : {&vm, &vp})
    for (Vertex v : *vs)
      for (int depth = 0; depth < d_; ++depth)
        for (int i = 0; i < k_; ++i)
          if (i != u.digit(v, depth)) cand.insert(edge_key(v, g_->partner(v, depth, i)));
  std::vector<std::pair<std::uint64_t, bool>> before;
  for (std::uint64_t key : cand) before.emplace_back(key, edge_live(key));
  live_ = std::move(live_next);
  removed_ = std::move(removed_next);
  EdgeLists ep, em_lists;
  for (auto [key, was] : before) {
    bool now = edge_live(key);
    if (was == now) continue;
    std::uint32_t f = u.flat(u.lcp(edge_lo(key), edge_hi(key)));
    (now ? ep : em_lists)[f].push_back(key);
  }

  std::set<RecursiveId> d1 = rec_update(u.root(), ep, em_lists, {}, dm_map);
  std::set<RecursiveId> d2 = rec_update(u.root(), {}, {}, dp_map, {});
  root_demand_ = std::move(next);
  std::set<std::uint64_t> out;
  for (const RecursiveId& id : d1) out.insert(id.base);
  for (const RecursiveId& id : d2) {
    if (!dp_map.count(id)) ++stats_.streaming_violations;
    out.insert(id.base);
  }
  for (const DemandPair& p : up.dplus) out.insert(p.id);
  return out;
}

std::map<std::uint64_t, DemandPair> DynamicRouter::demand() const { return root_demand_; }

Path DynamicRouter::get_path(std::uint64_t id) const {
  auto it = root_demand_.find(id);
  if (it == root_demand_.end()) throw std::out_of_range("unknown demand id " + std::to_string(id));
  Path out;
  get_path_into(g_->universe().root(), it->second.a, it->second.b, RecursiveId{id, 0, 0}, out);
  return out;
}

void DynamicRouter::get_path_into(Cluster c, Vertex a, Vertex b, RecursiveId id, Path& out) const {
  const Universe& u = g_->universe();
  auto emit = [&](Vertex v) {
    if (out.empty() || out.back() != v) out.push_back(v);
  };
  if (c.depth == d_) {
    if (a != b) throw std::logic_error("router: leaf pair with distinct endpoints");
    emit(a);
    return;
  }
  const Node& nd = nodes_[u.flat(c)];
  int i = u.digit(a, c.depth), j = u.digit(b, c.depth);
  Path head;
  bool ovf = false;
  if (i != j) {
    const Split& s = nd.split[static_cast<std::size_t>(std::min(i, j) * k_ + std::max(i, j))];
    ovf = s.ovf.count(id) != 0;
  }
  Vertex a0 = a, b0 = b;
  if (ovf) {
    auto [a1, c1] = orient(ovf_lb(c, i).bucket_of(id), u.child(c, i));
    auto [b1, d1] = orient(ovf_lb(c, j).bucket_of(id), u.child(c, j));
    get_path_into(u.child(c, i), a0, a1, id.child(1), out);
    emit(c1);
    get_path_into(u.child(c, j), b1, b0, id.child(1), head);
    head.insert(head.begin(), d1);
    a = c1;
    b = d1;
    i = u.digit(a, c.depth);
    j = u.digit(b, c.depth);
  }
  if (i == j) {
    get_path_into(u.child(c, i), a, b, id.child(0), out);
  } else {
    auto [a2, b2] = orient(dir_lb(c, std::min(i, j), std::max(i, j)).bucket_of(id), u.child(c, i));
    get_path_into(u.child(c, i), a, a2, id.child(0), out);
    Path tail;
    get_path_into(u.child(c, j), b2, b, id.child(0), tail);
    for (Vertex v : tail) emit(v);
  }
  for (Vertex v : head) emit(v);
}

std::string DynamicRouter::check_invariants() const {
  const Universe& u = g_->universe();
  for (std::size_t x = 0; x < ovf_.size(); ++x) {
    std::string e = ovf_[x].check();
    if (!e.empty()) return "overflow balancer: " + e;
  }
  for (std::size_t x = 0; x < dir_.size(); ++x) {
    std::string e = dir_[x].check();
    if (!e.empty()) return "direct balancer: " + e;
  }
  for (int depth = 0; depth < d_; ++depth) {
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      const Node& nd = nodes_[u.flat(c)];
      for (int i = 0; i < k_; ++i)
        for (int j = i + 1; j < k_; ++j) {
          const Split& s = nd.split[static_cast<std::size_t>(i * k_ + j)];
          auto T = static_cast<std::size_t>(threshold(c, i, j));
          if (s.base.size() > T) return "base exceeds threshold at " + u.label(c);
          if (!s.ovf.empty() && s.base.size() != T) return "overflow with base below threshold at " + u.label(c);
        }
    }
  }
  return {};
}

}  // namespace shc
