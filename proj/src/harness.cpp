#include "shc/harness.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace shc {

AdversaryKind parse_adversary(const std::string& name) {
  if (name == "random") return AdversaryKind::RandomVertex;
  if (name == "largest-nontarget") return AdversaryKind::LargestNonTarget;
  if (name == "random-edge") return AdversaryKind::RandomEdge;
  if (name == "script") return AdversaryKind::Scripted;
  throw std::invalid_argument("unknown adversary '" + name + "'");
}

std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::RandomVertex: return "random";
    case AdversaryKind::LargestNonTarget: return "largest-nontarget";
    case AdversaryKind::RandomEdge: return "random-edge";
    case AdversaryKind::Scripted: return "script";
  }
  return {};
}

Mode parse_mode(const std::string& name) {
  if (name == "strict") return Mode::Strict;
  if (name == "experimental") return Mode::Experimental;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

Adversary::Adversary(AdversaryKind kind, std::uint64_t seed, std::vector<Vertex> script)
    : kind_(kind), rng_(seed), script_(std::move(script)) {}

std::optional<Vertex> Adversary::next_vertex(const VertexTrie& live, const TargetFn& target) {
  const Universe& u = live.universe();
  if (kind_ == AdversaryKind::Scripted) {
    while (pos_ < script_.size()) {
      Vertex v = script_[pos_++];
      if (live.contains(v)) return v;
    }
    return std::nullopt;
  }
  if (live.size() == 0) return std::nullopt;
  if (kind_ == AdversaryKind::RandomVertex) return live.sample(u.root(), rng_);
  if (kind_ != AdversaryKind::LargestNonTarget) throw std::logic_error("edge adversary asked for a vertex");
  // Walk down through the largest child other than the current target.
  Cluster c = u.root();
  while (c.depth < u.d()) {
    int t = target ? target(c) : -1;
    int best = -1;
    std::uint32_t best_size = 0;
    for (int i = 0; i < u.k(); ++i) {
      std::uint32_t sz = live.size(u.child(c, i));
      if (i == t || sz == 0) continue;
      if (best < 0 || sz > best_size) {
        best = i;
        best_size = sz;
      }
    }
    if (best < 0) best = t;
    c = u.child(c, best);
  }
  return static_cast<Vertex>(c.prefix);
}

std::optional<std::uint64_t> Adversary::next_edge(const SemiHypercube& g, const VertexTrie& live,
                                                  const EdgeSet& removed) {
  std::vector<std::uint64_t> alive;
  for (auto [a, b] : g.edges())
    if (live.contains(a) && live.contains(b) && !removed.count(edge_key(a, b))) alive.push_back(edge_key(a, b));
  if (alive.empty()) return std::nullopt;
  return alive[rng_.below(alive.size())];
}

std::string Fraction::str() const {
  std::uint64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  return std::to_string(num / g) + "/" + std::to_string(den / g);
}

Fraction max_mark_ratio(const Pruner& p) {
  const Universe& u = p.universe();
  Fraction best{0, 1};
  for (int depth = 0; depth <= u.d(); ++depth)
    for (std::uint32_t q = 0; q < u.clusters_at(depth); ++q) {
      Cluster c{depth, q};
      std::uint32_t sz = p.live().size(c);
      if (sz == 0) continue;
      Fraction f{p.marked_count(c), sz};
      if (best < f) best = f;
    }
  return best;
}

namespace {

PruneReport run_prune_once(const PruneConfig& cfg, std::vector<Vertex>& deleted) {
  PruneReport rep;
  const SemiHypercube& g = *cfg.graph;
  Pruner p(g, cfg.tau, cfg.pruner);
  Adversary adv(cfg.adversary, cfg.seed, cfg.script);
  auto target = [&](Cluster c) { return p.target(c); };
  bool strict = cfg.pruner.mode == Mode::Strict;
  const Fraction limit{1, 20};
  for (std::uint64_t step = 0; !cfg.budget || step < *cfg.budget; ++step) {
    auto v = adv.next_vertex(p.live(), target);
    if (!v) break;
    deleted.push_back(*v);
    PruneRow row;
    row.deleted = *v;
    try {
      row.pruned_count = p.remove(*v).size();
    } catch (const InvariantError& e) {
      rep.failed = true;
      rep.failure = e.what();
      break;
    }
    row.remaining = p.live().size();
    row.valid = validate(g, p.live(), p.tau()).valid;
    row.max_mark_ratio = max_mark_ratio(p);
    rep.rows.push_back(row);
    if (strict && !row.valid) {
      rep.failed = true;
      rep.failure = "invalid after deleting " + g.universe().label(*v);
      break;
    }
    if (strict && limit < row.max_mark_ratio) {
      rep.failed = true;
      rep.failure = "mark ratio " + row.max_mark_ratio.str() + " above 1/20 after deleting " + g.universe().label(*v);
      break;
    }
  }
  return rep;
}

}  // namespace

PruneReport run_prune_experiment(const PruneConfig& cfg) {
  if (!cfg.graph) throw std::invalid_argument("prune experiment without a graph");
  std::vector<Vertex> deleted;
  PruneReport rep = run_prune_once(cfg, deleted);
  if (!rep.failed) return rep;
  if (!cfg.shrink_on_failure) {
    rep.repro = deleted;
    return rep;
  }
  PruneConfig replay = cfg;
  replay.adversary = AdversaryKind::Scripted;
  replay.budget.reset();
  std::function<bool(const std::vector<Vertex>&)> fails = [&](const std::vector<Vertex>& ops) {
    replay.script = ops;
    std::vector<Vertex> scratch;
    return run_prune_once(replay, scratch).failed;
  };
  rep.repro = shrink(deleted, fails);
  return rep;
}

void write_prune_csv(std::ostream& out, const Universe& u, const std::vector<PruneRow>& rows) {
  out << "deleted,pruned_count,remaining,valid,max_mark_ratio\n";
  for (const PruneRow& r : rows)
    out << u.label(r.deleted) << ',' << r.pruned_count << ',' << r.remaining << ',' << (r.valid ? "true" : "false")
        << ',' << r.max_mark_ratio.str() << '\n';
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "update,op,pruned_count,remaining,valid,max_congestion,max_length,recourse,bound_ok\n";
  for (const MetricsRow& r : rows)
    out << r.update << ',' << r.op << ',' << r.pruned_count << ',' << r.remaining << ','
        << (r.valid ? "true" : "false") << ',' << r.max_congestion << ',' << r.max_length << ',' << r.recourse << ','
        << (r.bound_ok ? "true" : "false") << '\n';
}

RouterUpdate to_router_update(const DynamicRouter& r, const ScriptStep& step) {
  RouterUpdate ru;
  std::map<std::uint64_t, DemandPair> dem;
  bool have_dem = false;
  for (const ScriptOp& op : step) {
    switch (op.kind) {
      case ScriptOp::Kind::DelVertex: ru.vminus.push_back(op.a); break;
      case ScriptOp::Kind::AddVertex: ru.vplus.push_back(op.a); break;
      case ScriptOp::Kind::DelEdge: ru.eminus.push_back(edge_key(op.a, op.b)); break;
      case ScriptOp::Kind::AddEdge: ru.eplus.push_back(edge_key(op.a, op.b)); break;
      case ScriptOp::Kind::AddDemand: ru.dplus.push_back({op.a, op.b, op.id}); break;
      case ScriptOp::Kind::RemDemand: {
        if (!have_dem) {
          dem = r.demand();
          have_dem = true;
        }
        auto it = dem.find(op.id);
        if (it == dem.end()) throw ContractError("removing unknown demand id " + std::to_string(op.id));
        ru.dminus.push_back(it->second);
        break;
      }
    }
  }
  return ru;
}

MetricsRow measure_router(const SemiHypercube& g, const DynamicRouter& r) {
  MetricsRow m;
  CongestionMap cong;
  for (const auto& [id, p] : r.demand()) {
    Path path = r.get_path(id);
    bool ok = path_is_valid(g, r.live(), path, &r.removed()) && path.front() == p.a && path.back() == p.b;
    m.valid = m.valid && ok;
    cong.add(path);
    m.max_length = std::max<std::uint64_t>(m.max_length, path.empty() ? 0 : path.size() - 1);
  }
  m.max_congestion = cong.max;
  m.remaining = r.live().size();
  m.bound_ok = m.valid && m.max_congestion <= r.congestion_bound() && m.max_length <= r.length_bound() &&
               r.recourse().violations == 0 && r.recourse().streaming_violations == 0 &&
               r.check_invariants().empty();
  return m;
}

namespace {

std::string describe(const Universe& u, const ScriptStep& step) {
  std::string s;
  for (std::size_t i = 0; i < step.size(); ++i) s += (i ? " ; " : "") + format_op(u, step[i]);
  return s;
}

RoutingReport run_routing_once(const RoutingConfig& cfg) {
  RoutingReport rep;
  const SemiHypercube& g = *cfg.graph;
  const Universe& u = g.universe();
  VertexTrie live(u);
  for (Vertex v : cfg.removed.vertices)
    if (live.contains(v)) live.remove(v);
  EdgeSet removed(cfg.removed.edges.begin(), cfg.removed.edges.end());
  DynamicRouter r(g, live, removed, cfg.demand, cfg.tau, cfg.L, cfg.mode);
  bool strict = cfg.mode == Mode::Strict;
  MetricsRow init = measure_router(g, r);
  init.op = "init";
  rep.rows.push_back(init);
  if (strict && !init.bound_ok) {
    rep.failed = true;
    rep.failure = "bounds fail on the initial routing";
    return rep;
  }
  for (std::size_t i = 0; i < cfg.script.size(); ++i) {
    std::set<std::uint64_t> changed;
    try {
      changed = r.update(to_router_update(r, cfg.script[i]));
    } catch (const std::exception& e) {
      rep.failed = true;
      rep.failure = "update " + std::to_string(i + 1) + ": " + e.what();
      return rep;
    }
    MetricsRow m = measure_router(g, r);
    m.update = i + 1;
    m.op = describe(u, cfg.script[i]);
    m.recourse = changed.size();
    rep.rows.push_back(m);
    if (strict && !m.bound_ok) {
      rep.failed = true;
      rep.failure = "bounds fail after update " + std::to_string(i + 1);
      return rep;
    }
  }
  return rep;
}

}  // namespace

RoutingReport run_routing_experiment(const RoutingConfig& cfg) {
  if (!cfg.graph) throw std::invalid_argument("routing experiment without a graph");
  RoutingReport rep = run_routing_once(cfg);
  if (!rep.failed || rep.rows.empty()) return rep;
  std::vector<ScriptStep> done(cfg.script.begin(),
                               cfg.script.begin() + static_cast<std::ptrdiff_t>(std::min(rep.rows.size(), cfg.script.size())));
  if (!cfg.shrink_on_failure) {
    rep.repro = done;
    return rep;
  }
  RoutingConfig replay = cfg;
  replay.shrink_on_failure = false;
  std::function<bool(const std::vector<ScriptStep>&)> fails = [&](const std::vector<ScriptStep>& ops) {
    replay.script = ops;
    try {
      return run_routing_once(replay).failed;
    } catch (const std::exception&) {
      return false;
    }
  };
  rep.repro = shrink(done, fails);
  return rep;
}

void write_dynroute_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "update,recourse,max_congestion,max_length,recourse_bound_ok\n";
  for (const MetricsRow& r : rows)
    out << r.update << ',' << r.recourse << ',' << r.max_congestion << ',' << r.max_length << ','
        << (r.bound_ok ? "true" : "false") << '\n';
}

SampleReport sample_routes(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed, const Tau& tau,
                           const std::vector<std::pair<Vertex, Vertex>>& pairs, std::uint64_t seed) {
  SampleReport rep;
  Rng root(seed);
  for (auto [s, t] : pairs) {
    Rng rng = root.split();
    SamplePathResult res = sample_path(g, live, tau, s, t, rng);
    SampleRow row{s, t, res.path.empty() ? 0 : res.path.size() - 1, res.midpoint_attempts, true};
    row.valid = path_is_valid(g, live, res.path, &removed) && res.path.front() == s && res.path.back() == t;
    rep.congestion.add(res.path);
    rep.rows.push_back(row);
  }
  return rep;
}

void write_sample_csv(std::ostream& out, const Universe& u, const SampleReport& r) {
  out << "src,dst,length,attempts\n";
  for (const SampleRow& s : r.rows)
    out << u.label(s.src) << ',' << u.label(s.dst) << ',' << s.length << ',' << s.attempts << '\n';
}

void write_congestion_csv(std::ostream& out, const Universe& u, const CongestionMap& c) {
  out << "u,v,count\n";
  for (const auto& [key, n] : c.count) out << u.label(edge_lo(key)) << ',' << u.label(edge_hi(key)) << ',' << n << '\n';
}

EmbedReport run_embed_experiment(const Embedding& e, const EmbedOptions& opt,
                                 const std::vector<std::pair<Vertex, Vertex>>& deletions) {
  EmbedReport rep;
  EmbedPruner ep(e, opt);
  std::uint64_t step = 0;
  for (auto [a, b] : deletions) {
    if (!ep.host_edge_alive(a, b)) continue;
    EmbedStep st = ep.prune_step(a, b);
    EmbedRow row;
    row.step = ++step;
    row.u = a;
    row.v = b;
    row.aff = st.aff.size();
    row.vminus = st.vminus.size();
    row.eminus = st.eminus.size();
    row.trim = st.trim.size();
    row.host_remaining = ep.host_alive_count();
    row.core_remaining = ep.core().size();
    std::string inv = ep.check_invariants();
    row.invariants_ok = inv.empty();
    row.trim_ok = row.trim <= (ep.dilation() + 1) * row.eminus;
    row.aff_ok = row.aff <= 2 * ep.kappa();
    rep.rows.push_back(row);
    if (!row.invariants_ok || !row.trim_ok || !row.aff_ok) {
      rep.failed = true;
      rep.failure = "step " + std::to_string(row.step) + ": " +
                    (!inv.empty() ? inv : !row.trim_ok ? "trim bound exceeded" : "affected set above 2 kappa");
      break;
    }
  }
  return rep;
}

void write_embed_csv(std::ostream& out, const std::vector<EmbedRow>& rows) {
  out << "step,u,v,aff,vminus,eminus,trim,host_remaining,core_remaining,invariants_ok,trim_ok,aff_ok\n";
  auto b = [](bool x) { return x ? "true" : "false"; };
  for (const EmbedRow& r : rows)
    out << r.step << ',' << r.u << ',' << r.v << ',' << r.aff << ',' << r.vminus << ',' << r.eminus << ',' << r.trim
        << ',' << r.host_remaining << ',' << r.core_remaining << ',' << b(r.invariants_ok) << ',' << b(r.trim_ok)
        << ',' << b(r.aff_ok) << '\n';
}

namespace {
// r^d, saturating just above n.
bool pow_at_most(std::uint64_t r, int d, std::uint64_t n) {
  unsigned __int128 acc = 1;
  for (int i = 0; i < d; ++i) {
    acc *= r;
    if (acc > n) return false;
  }
  return true;
}
}  // namespace

std::uint64_t integer_root(std::uint64_t n, int d) {
  if (d < 1) throw std::invalid_argument("root degree must be positive");
  auto r = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
  while (r > 0 && !pow_at_most(r, d, n)) --r;
  while (pow_at_most(r + 1, d, n)) ++r;
  return r;
}

ParamSuggestion suggest_parameters(std::uint64_t n_target, int d) {
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  ParamSuggestion s;
  s.d = d;
  s.k = static_cast<int>(std::min<std::uint64_t>(integer_root(n_target, d), 1u << 30));
  s.tau = Tau::strict(d);
  if (s.k >= 2) s.rho = strict_rho(s.k, d, s.tau);
  else s.warnings.push_back("k = " + std::to_string(s.k) + " leaves no room for a semi-hypercube");
  if (s.k < 16 * d)
    s.warnings.push_back("k = " + std::to_string(s.k) + " < 16d = " + std::to_string(16 * d) +
                         ": strict guarantees assume k >= 16d");
  unsigned __int128 kd = 1;
  for (int i = 0; i < d; ++i) kd *= static_cast<unsigned>(s.k);
  if (kd != n_target)
    s.warnings.push_back("k^d = " + std::to_string(static_cast<std::uint64_t>(kd)) + " differs from n = " +
                         std::to_string(n_target));
  return s;
}

}  // namespace shc
