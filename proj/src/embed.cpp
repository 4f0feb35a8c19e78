#include "shc/embed.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace shc {

namespace {

std::string hedge_name(const Universe& u, std::uint64_t key) {
  return u.label(edge_lo(key)) + "-" + u.label(edge_hi(key));
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

void check_embedding(const Embedding& e) {
  const Universe& u = e.h.universe();
  if (e.host_of.size() != u.n()) throw FormatError("embedding must place every H vertex");
  std::vector<std::uint8_t> used(e.host.n, 0);
  for (Vertex x = 0; x < u.n(); ++x) {
    Vertex hv = e.host_of[x];
    if (hv >= e.host.n) throw FormatError("H vertex " + u.label(x) + " placed outside the host");
    if (used[hv]) throw FormatError("two H vertices share host vertex " + std::to_string(hv));
    used[hv] = 1;
  }
  std::vector<std::uint8_t> covered(e.host.n, 0);
  std::size_t seen = 0;
  for (auto [a, b] : e.h.edges()) {
    std::uint64_t key = edge_key(a, b);
    auto it = e.paths.find(key);
    if (it == e.paths.end()) throw FormatError("no path for H edge " + hedge_name(u, key));
    ++seen;
    const Path& p = it->second;
    if (p.size() < 2 || p.front() != e.host_of[a] || p.back() != e.host_of[b])
      throw FormatError("path for H edge " + hedge_name(u, key) + " has wrong endpoints");
    std::vector<Vertex> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw FormatError("path for H edge " + hedge_name(u, key) + " repeats a vertex");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] >= e.host.n) throw FormatError("path for H edge " + hedge_name(u, key) + " leaves the host");
      covered[p[i]] = 1;
      if (i > 0 && !e.host.has_edge(p[i - 1], p[i]))
        throw FormatError("path for H edge " + hedge_name(u, key) + " uses missing host edge " +
                          std::to_string(p[i - 1]) + "-" + std::to_string(p[i]));
    }
  }
  if (seen != e.paths.size()) throw FormatError("embedding has a path for a non-edge of H");
  for (Vertex v = 0; v < e.host.n; ++v)
    if (!covered[v]) throw FormatError("host vertex " + std::to_string(v) + " is on no path");
}

Embedding identity_embedding(const SemiHypercube& h) {
  Embedding e;
  e.h = h;
  e.host.n = h.n();
  e.host_of.resize(h.n());
  for (Vertex x = 0; x < h.n(); ++x) e.host_of[x] = x;
  for (auto [a, b] : h.edges()) {
    e.host.edges.insert(edge_key(a, b));
    e.paths[edge_key(a, b)] = {a, b};
  }
  return e;
}

Embedding subdivided_embedding(const SemiHypercube& h, std::uint32_t extra, std::uint64_t seed) {
  Embedding e = identity_embedding(h);
  auto edges = h.edges();
  if (extra > edges.size()) throw std::invalid_argument("more subdivisions than H edges");
  Rng rng(seed);
  rng.shuffle(edges.begin(), edges.end());
  for (std::uint32_t i = 0; i < extra; ++i) {
    auto [a, b] = edges[i];
    Vertex x = e.host.n++;
    e.host.edges.erase(edge_key(a, b));
    e.host.edges.insert(edge_key(a, x));
    e.host.edges.insert(edge_key(x, b));
    e.paths[edge_key(a, b)] = {a, x, b};
  }
  return e;
}

std::uint64_t embedding_congestion(const Embedding& e) {
  std::unordered_map<std::uint64_t, std::uint64_t> load;
  std::uint64_t best = 0;
  for (const auto& [key, p] : e.paths)
    for (std::size_t i = 1; i < p.size(); ++i) best = std::max(best, ++load[edge_key(p[i - 1], p[i])]);
  return best;
}

std::uint64_t embedding_dilation(const Embedding& e) {
  std::uint64_t best = 0;
  for (const auto& [key, p] : e.paths) best = std::max<std::uint64_t>(best, p.size() - 1);
  return best;
}

EmbedPruner::EmbedPruner(const Embedding& e, EmbedOptions opt)
    : e_(&e),
      tau_(opt.tau ? *opt.tau : Tau::strict(e.h.d())),
      pruner_((check_embedding(e), e.h), tau_, opt.pruner),
      h_of_(e.host.n, kNoVertex),
      alive_(e.host.n, 1),
      alive_count_(e.host.n),
      uv_(e.host.n),
      conn_(e.host.n, kNoEdge) {
  for (Vertex x = 0; x < e.h.n(); ++x) h_of_[e.host_of[x]] = x;
  for (const auto& [key, p] : e.paths) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      uv_[p[i]].insert(key);
      if (i > 0) ue_[edge_key(p[i - 1], p[i])].insert(key);
    }
  }
  for (Vertex v = 0; v < e.host.n; ++v) conn_[v] = *uv_[v].begin();
  kappa_ = embedding_congestion(e);
  h_ = embedding_dilation(e);
}

bool EmbedPruner::host_edge_alive(Vertex u, Vertex v) const {
  if (u >= alive_.size() || v >= alive_.size() || !alive_[u] || !alive_[v]) return false;
  if (!e_->host.has_edge(u, v)) return false;
  return host_removed_.count(edge_key(u, v)) == 0;
}

bool EmbedPruner::in_core_edge(std::uint64_t hkey) const {
  return core().contains(edge_lo(hkey)) && core().contains(edge_hi(hkey));
}

Path EmbedPruner::oriented(std::uint64_t hkey, Vertex from_h) const {
  Path p = e_->paths.at(hkey);
  if (from_h != edge_lo(hkey)) std::reverse(p.begin(), p.end());
  return p;
}

EmbedStep EmbedPruner::prune_step(Vertex u, Vertex v) {
  if (!host_edge_alive(u, v))
    throw NotPresentError("host edge " + std::to_string(u) + "-" + std::to_string(v) + " is not present");
  std::uint64_t del = edge_key(u, v);
  host_removed_.insert(del);
  EmbedStep out;

  std::set<Vertex> aff;
  if (auto it = ue_.find(del); it != ue_.end())
    for (std::uint64_t hk : it->second) {
      aff.insert(edge_lo(hk));
      aff.insert(edge_hi(hk));
    }
  out.aff.assign(aff.begin(), aff.end());

  std::set<Vertex> vminus;
  for (Vertex x : aff) {
    if (!core().contains(x)) continue;
    vminus.insert(x);
    for (Vertex p : pruner_.remove(x)) vminus.insert(p);
  }
  out.vminus.assign(vminus.begin(), vminus.end());

  const SemiHypercube& g = e_->h;
  std::set<std::uint64_t> eminus;
  for (Vertex x : vminus) {
    for (int depth = 0; depth < g.d(); ++depth)
      for (int i = 0; i < g.k(); ++i) {
        Vertex y = g.partner(x, depth, i);
        if (y == kNoVertex) continue;
        if (core().contains(y) || vminus.count(y)) eminus.insert(edge_key(x, y));
      }
  }
  out.eminus.assign(eminus.begin(), eminus.end());

  std::set<Vertex> keys;
  for (Vertex x : vminus) keys.insert(e_->host_of[x]);
  for (std::uint64_t hk : eminus) {
    const Path& p = e_->paths.at(hk);
    for (std::size_t i = 0; i < p.size(); ++i) {
      uv_[p[i]].erase(hk);
      keys.insert(p[i]);
      if (i == 0) continue;
      auto it = ue_.find(edge_key(p[i - 1], p[i]));
      it->second.erase(hk);
      if (it->second.empty()) ue_.erase(it);
    }
  }
  for (Vertex w : keys) {
    if (!alive_[w]) continue;
    bool anchored = h_of_[w] != kNoVertex && core().contains(h_of_[w]);
    if (uv_[w].empty()) {
      conn_[w] = kNoEdge;
      if (anchored) continue;
      alive_[w] = 0;
      --alive_count_;
      out.trim.push_back(w);
    } else if (!uv_[w].count(conn_[w])) {
      conn_[w] = *uv_[w].begin();
      out.reconnected.push_back(w);
    }
  }
  return out;
}

Vertex EmbedPruner::rep(Vertex v) const {
  if (v >= alive_.size() || !alive_[v]) throw NotPresentError("host vertex " + std::to_string(v) + " is not present");
  if (h_of_[v] != kNoVertex && core().contains(h_of_[v])) return v;
  return e_->host_of[edge_lo(conn_[v])];
}

Vertex EmbedPruner::rep_h(Vertex v) const { return h_of_[rep(v)]; }

Path EmbedPruner::connection(Vertex v) const {
  Vertex r = rep(v);
  if (r == v) return {v};
  const Path& p = e_->paths.at(conn_[v]);
  auto it = std::find(p.begin(), p.end(), v);
  Path out(p.begin(), it + 1);
  std::reverse(out.begin(), out.end());
  return out;
}

Path EmbedPruner::project(const Path& hp) const {
  if (hp.empty()) return {};
  Path out{e_->host_of[hp[0]]};
  for (std::size_t i = 1; i < hp.size(); ++i) {
    Path q = oriented(edge_key(hp[i - 1], hp[i]), hp[i - 1]);
    out.insert(out.end(), q.begin() + 1, q.end());
  }
  return out;
}

Path EmbedPruner::sample_path(Vertex u, Vertex v, Rng& rng) const {
  if (u == v) {
    if (!host_alive(u)) throw NotPresentError("sample from a removed host vertex");
    return {u};
  }
  Path out = connection(u);
  Path mid = project(shc::sample_path(e_->h, core(), tau_, rep_h(u), rep_h(v), rng).path);
  if (!mid.empty()) out.insert(out.end(), mid.begin() + 1, mid.end());
  Path tail = connection(v);
  out.insert(out.end(), tail.rbegin() + 1, tail.rend());
  return out;
}

bool EmbedPruner::host_path_valid(const Path& p) const {
  if (p.empty()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= alive_.size() || !alive_[p[i]]) return false;
    if (i > 0 && !host_edge_alive(p[i - 1], p[i])) return false;
  }
  return true;
}

std::string EmbedPruner::check_invariants() const {
  std::vector<std::set<std::uint64_t>> uv(alive_.size());
  std::unordered_map<std::uint64_t, std::set<std::uint64_t>> ue;
  const Universe& u = e_->h.universe();
  for (const auto& [hk, p] : e_->paths) {
    if (!in_core_edge(hk)) continue;
    if (!host_path_valid(p)) return "path of core edge " + hedge_name(u, hk) + " is broken";
    for (std::size_t i = 0; i < p.size(); ++i) {
      uv[p[i]].insert(hk);
      if (i > 0) ue[edge_key(p[i - 1], p[i])].insert(hk);
    }
  }
  for (Vertex v = 0; v < alive_.size(); ++v) {
    if (uv[v] != uv_[v]) return "U_v out of date at host vertex " + std::to_string(v);
    bool anchored = h_of_[v] != kNoVertex && core().contains(h_of_[v]);
    if (anchored && !alive_[v]) return "core vertex " + std::to_string(v) + " was trimmed";
    if (!alive_[v]) continue;
    if (anchored) continue;
    if (uv_[v].empty()) return "host vertex " + std::to_string(v) + " is uncovered";
    if (!uv_[v].count(conn_[v])) return "conn of host vertex " + std::to_string(v) + " is not in U_v";
  }
  if (ue != ue_) return "U_e out of date";
  std::uint32_t cnt = 0;
  for (auto a : alive_) cnt += a;
  if (cnt != alive_count_) return "alive count drift";
  return {};
}

namespace {

std::vector<DemandPair> initial_projection(const EmbedPruner& p, const std::vector<DemandPair>& demand) {
  std::vector<DemandPair> out;
  out.reserve(demand.size());
  for (const DemandPair& d : demand) {
    if (d.a >= p.embedding().host.n || d.b >= p.embedding().host.n)
      throw ContractError("demand endpoint outside the host");
    out.push_back({p.rep_h(d.a), p.rep_h(d.b), d.id});
  }
  return out;
}

std::uint64_t representative_share(const Embedding& e, std::uint64_t L) {
  std::uint64_t h = embedding_dilation(e);
  std::uint64_t deg = static_cast<std::uint64_t>(e.h.k() - 1) * static_cast<std::uint64_t>(e.h.d());
  std::uint64_t share = sat_mul(deg, h == 0 ? 0 : h - 1);
  share = share == std::numeric_limits<std::uint64_t>::max() ? share : share + 1;
  return sat_mul(L, share);
}

}  // namespace

EmbedRouter::EmbedRouter(const Embedding& e, const std::vector<DemandPair>& demand, std::uint64_t L,
                         EmbedOptions opt, Mode router_mode)
    : pruner_(e, opt),
      L_(L),
      lproj_(representative_share(e, L)),
      router_(e.h, pruner_.core(), EdgeSet{}, initial_projection(pruner_, demand), pruner_.tau(), lproj_,
              router_mode) {
  if (!demand_load_ok(demand, L)) throw ContractError("host demand load exceeds L");
  for (const DemandPair& d : demand) {
    demand_[d.id] = d;
    proj_[d.id] = projected(d);
  }
}

DemandPair EmbedRouter::projected(const DemandPair& p) const {
  return {pruner_.rep_h(p.a), pruner_.rep_h(p.b), p.id};
}

EmbedStep EmbedRouter::prune_step(Vertex u, Vertex v) {
  EmbedStep st = pruner_.prune_step(u, v);
  pend_v_.insert(st.vminus.begin(), st.vminus.end());
  std::set<Vertex> moved(st.reconnected.begin(), st.reconnected.end());
  for (const auto& [id, p] : demand_) {
    if (moved.count(p.a) || moved.count(p.b)) dirty_.insert(id);
    if (!pruner_.host_alive(p.a) || !pruner_.host_alive(p.b)) {
      if (proj_.count(id)) pend_minus_.insert(id);
      pend_plus_.erase(id);
      dirty_.insert(id);
      continue;
    }
    DemandPair np = projected(p);
    auto pit = pend_plus_.find(id);
    const DemandPair* cur = nullptr;
    if (pit != pend_plus_.end()) {
      cur = &pit->second;
    } else if (!pend_minus_.count(id)) {
      cur = &proj_.at(id);
    }
    if (cur && *cur == np) continue;
    if (proj_.count(id)) pend_minus_.insert(id);
    pend_plus_[id] = np;
    dirty_.insert(id);
  }
  return st;
}

std::set<std::uint64_t> EmbedRouter::reroute_step(const std::vector<DemandPair>& dplus,
                                                  const std::vector<DemandPair>& dminus) {
  std::map<std::uint64_t, DemandPair> next = demand_;
  for (const DemandPair& m : dminus) {
    auto it = next.find(m.id);
    if (it == next.end()) throw ContractError("removing unknown demand id");
    if (!(it->second == m)) throw ContractError("removed demand endpoints do not match");
    next.erase(it);
  }
  for (const DemandPair& p : dplus) {
    if (!pruner_.host_alive(p.a) || !pruner_.host_alive(p.b)) throw ContractError("demand endpoint not present");
    if (!next.emplace(p.id, p).second) throw ContractError("adding duplicate demand id");
  }
  for (const auto& [id, p] : next)
    if (!pruner_.host_alive(p.a) || !pruner_.host_alive(p.b))
      throw ContractError("demand " + std::to_string(id) + " still touches a trimmed vertex");
  std::vector<DemandPair> all;
  for (const auto& [id, p] : next) all.push_back(p);
  if (!demand_load_ok(all, L_)) throw ContractError("demand load exceeds L");

  for (const DemandPair& m : dminus) {
    pend_plus_.erase(m.id);
    if (proj_.count(m.id)) pend_minus_.insert(m.id);
    dirty_.insert(m.id);
  }
  for (const DemandPair& p : dplus) {
    pend_plus_[p.id] = projected(p);
    dirty_.insert(p.id);
  }
  demand_ = std::move(next);

  RouterUpdate ru;
  ru.vminus.assign(pend_v_.begin(), pend_v_.end());
  for (std::uint64_t id : pend_minus_) ru.dminus.push_back(proj_.at(id));
  for (const auto& [id, p] : pend_plus_) ru.dplus.push_back(p);
  std::set<std::uint64_t> changed = router_.update(ru);
  for (std::uint64_t id : pend_minus_) proj_.erase(id);
  for (const auto& [id, p] : pend_plus_) proj_[id] = p;
  changed.insert(dirty_.begin(), dirty_.end());
  pend_minus_.clear();
  pend_plus_.clear();
  pend_v_.clear();
  dirty_.clear();
  return changed;
}

Path EmbedRouter::get_path(std::uint64_t id) const {
  if (pending()) throw std::logic_error("get_path with unflushed prune steps");
  const DemandPair& p = demand_.at(id);
  Path out = pruner_.connection(p.a);
  Path mid = pruner_.project(router_.get_path(id));
  if (!mid.empty()) out.insert(out.end(), mid.begin() + 1, mid.end());
  Path tail = pruner_.connection(p.b);
  out.insert(out.end(), tail.rbegin() + 1, tail.rend());
  return out;
}

}  // namespace shc
