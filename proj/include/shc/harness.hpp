#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shc/core.hpp"
#include "shc/dynroute.hpp"
#include "shc/embed.hpp"
#include "shc/io.hpp"
#include "shc/prune.hpp"
#include "shc/rng.hpp"
#include "shc/route.hpp"

namespace shc {

enum class AdversaryKind { RandomVertex, LargestNonTarget, RandomEdge, Scripted };

AdversaryKind parse_adversary(const std::string& name);
std::string to_string(AdversaryKind k);
Mode parse_mode(const std::string& name);

// Deterministic deletion source.
class Adversary {
 public:
  using TargetFn = std::function<int(Cluster)>;

  Adversary(AdversaryKind kind, std::uint64_t seed, std::vector<Vertex> script = {});

  // Next vertex to delete; scripted entries that are already gone are
  // skipped. nullopt once nothing is left to delete.
  std::optional<Vertex> next_vertex(const VertexTrie& live, const TargetFn& target = {});
  // Uniform surviving edge (edge_key form).
  std::optional<std::uint64_t> next_edge(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed);

  AdversaryKind kind() const { return kind_; }

 private:
  AdversaryKind kind_;
  Rng rng_;
  std::vector<Vertex> script_;
  std::size_t pos_ = 0;
};

// Removes the ops a failing run does not need: shortest failing prefix by
// binary search, then single-op removals while the run still fails.
template <class Op>
std::vector<Op> shrink(std::vector<Op> ops, const std::function<bool(const std::vector<Op>&)>& fails) {
  if (!fails(ops)) return ops;
  std::size_t lo = 0;
  std::size_t hi = ops.size();
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    std::vector<Op> pre(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(mid));
    if (fails(pre)) hi = mid;
    else lo = mid + 1;
  }
  ops.resize(hi);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      std::vector<Op> cut(ops);
      cut.erase(cut.begin() + static_cast<std::ptrdiff_t>(i));
      if (fails(cut)) {
        ops = std::move(cut);
        changed = true;
        break;
      }
    }
  }
  return ops;
}

// Exact nonnegative fraction.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool operator<(const Fraction& o) const {
    return static_cast<unsigned __int128>(num) * o.den < static_cast<unsigned __int128>(o.num) * den;
  }
  std::string str() const;
};

struct PruneConfig {
  const SemiHypercube* graph = nullptr;
  Tau tau;
  PrunerOptions pruner;
  AdversaryKind adversary = AdversaryKind::RandomVertex;
  std::uint64_t seed = 0;
  std::vector<Vertex> script;
  std::optional<std::uint64_t> budget;  // deletions; runs to emptiness when unset
  bool shrink_on_failure = true;
};

struct PruneRow {
  Vertex deleted = kNoVertex;
  std::uint64_t pruned_count = 0;
  std::uint64_t remaining = 0;
  bool valid = true;
  Fraction max_mark_ratio;
};

struct PruneReport {
  std::vector<PruneRow> rows;
  bool failed = false;
  std::string failure;
  std::vector<Vertex> repro;  // minimized deletion sequence when failed
};

// Largest |M^shadow| / |V| over nonempty clusters.
Fraction max_mark_ratio(const Pruner& p);

PruneReport run_prune_experiment(const PruneConfig& cfg);
void write_prune_csv(std::ostream& out, const Universe& u, const std::vector<PruneRow>& rows);

struct MetricsRow {
  std::uint64_t update = 0;
  std::string op;
  std::uint64_t pruned_count = 0;
  std::uint64_t remaining = 0;
  bool valid = true;
  std::uint64_t max_congestion = 0;
  std::uint64_t max_length = 0;
  std::uint64_t recourse = 0;
  bool bound_ok = true;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

struct RoutingConfig {
  const SemiHypercube* graph = nullptr;
  RemovedSet removed;
  Tau tau;
  std::uint64_t L = 1;
  Mode mode = Mode::Strict;
  std::vector<DemandPair> demand;
  std::vector<ScriptStep> script;
  bool shrink_on_failure = true;
};

struct RoutingReport {
  std::vector<MetricsRow> rows;
  bool failed = false;
  std::string failure;
  std::vector<ScriptStep> repro;
};

RouterUpdate to_router_update(const DynamicRouter& r, const ScriptStep& step);
// Rebuilds every path and checks it against the router's graph. Returns the
// metrics row without update/op filled in.
MetricsRow measure_router(const SemiHypercube& g, const DynamicRouter& r);
RoutingReport run_routing_experiment(const RoutingConfig& cfg);
// Columns: update, recourse, max_congestion, max_length, recourse_bound_ok.
void write_dynroute_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

struct SampleRow {
  Vertex src = kNoVertex;
  Vertex dst = kNoVertex;
  std::uint64_t length = 0;
  int attempts = 0;
  bool valid = true;
};

struct SampleReport {
  std::vector<SampleRow> rows;
  CongestionMap congestion;
};

// One SamplePath per pair, each from its own split stream.
SampleReport sample_routes(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed, const Tau& tau,
                           const std::vector<std::pair<Vertex, Vertex>>& pairs, std::uint64_t seed);
void write_sample_csv(std::ostream& out, const Universe& u, const SampleReport& r);
void write_congestion_csv(std::ostream& out, const Universe& u, const CongestionMap& c);

struct EmbedRow {
  std::uint64_t step = 0;
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  std::uint64_t aff = 0;
  std::uint64_t vminus = 0;
  std::uint64_t eminus = 0;
  std::uint64_t trim = 0;
  std::uint64_t host_remaining = 0;
  std::uint64_t core_remaining = 0;
  bool invariants_ok = true;
  bool trim_ok = true;  // |V^trim| <= (h+1)|E^-|
  bool aff_ok = true;   // |V^aff| <= 2 kappa
};

struct EmbedReport {
  std::vector<EmbedRow> rows;
  bool failed = false;
  std::string failure;
};

// Applies host edge deletions; edges already gone are skipped.
EmbedReport run_embed_experiment(const Embedding& e, const EmbedOptions& opt,
                                 const std::vector<std::pair<Vertex, Vertex>>& deletions);
void write_embed_csv(std::ostream& out, const std::vector<EmbedRow>& rows);

struct ParamSuggestion {
  int k = 0;
  int d = 0;
  Tau tau;
  std::uint64_t rho = 0;
  std::vector<std::string> warnings;
};

ParamSuggestion suggest_parameters(std::uint64_t n_target, int d);
// Largest r with r^d <= n.
std::uint64_t integer_root(std::uint64_t n, int d);

}  // namespace shc
