#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "shc/balance.hpp"
#include "shc/core.hpp"
#include "shc/prune.hpp"
#include "shc/route.hpp"
#include "shc/validate.hpp"

namespace shc {

// Recursive demand id: the caller's id plus the 2id / 2id+1 choices taken on
// the way down. Within one cluster every id has the same length, so ordering
// by (base, bits) is ordering by the integer the doubling scheme would give.
struct RecursiveId {
  std::uint64_t base = 0;
  std::uint64_t bits = 0;
  int len = 0;

  RecursiveId child(int bit) const { return {base, (bits << 1) | static_cast<std::uint64_t>(bit), len + 1}; }
  RecursiveId parent() const { return {base, bits >> 1, len - 1}; }
  friend bool operator==(const RecursiveId& a, const RecursiveId& b) {
    return a.base == b.base && a.bits == b.bits && a.len == b.len;
  }
  friend bool operator<(const RecursiveId& a, const RecursiveId& b) {
    if (a.len != b.len) return a.len < b.len;
    if (a.base != b.base) return a.base < b.base;
    return a.bits < b.bits;
  }
};

struct DemandPair {
  Vertex a = kNoVertex;
  Vertex b = kNoVertex;
  std::uint64_t id = 0;
  friend bool operator==(const DemandPair&, const DemandPair&) = default;
};

struct RouterUpdate {
  std::vector<Vertex> vplus;
  std::vector<Vertex> vminus;
  std::vector<std::uint64_t> eplus;   // edge keys
  std::vector<std::uint64_t> eminus;  // edge keys; edges at removed vertices are implied
  std::vector<DemandPair> dplus;
  std::vector<DemandPair> dminus;
};

struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Per-call record of sum_i |D+_{s+i}| + |D-_{s+i}| against
// 72 (|D+_s| + |D-_s|) + 320 L_{|s|} (|E+_s| + |E-_s|).
struct RecourseStats {
  std::uint64_t calls = 0;
  std::uint64_t violations = 0;
  std::uint64_t worst_lhs = 0;
  std::uint64_t worst_rhs = 0;
  // Addition-pass ids outside the added set.
  std::uint64_t streaming_violations = 0;
};

// L-load check: every vertex is an endpoint of at most L pairs (a pair with
// a = b counts twice at a).
bool demand_load_ok(const std::vector<DemandPair>& demand, std::uint64_t L);

// Graph precondition the router relies on: validate(tau) passes on the
// surviving edges and any two nonempty siblings keep at least one edge.
bool routable(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed, const Tau& tau);

// Deterministic dynamic router over a (k,d,tau)-semi-hypercube with
// per-cluster base/overflow splits and load-balanced edge assignment.
class DynamicRouter {
 public:
  DynamicRouter(const SemiHypercube& g, const VertexTrie& live, const EdgeSet& removed,
                const std::vector<DemandPair>& demand, Tau tau, std::uint64_t L, Mode mode = Mode::Strict);

  // Removals first, then additions. Returns ids whose path changed.
  std::set<std::uint64_t> update(const RouterUpdate& u);

  Path get_path(std::uint64_t id) const;
  std::map<std::uint64_t, DemandPair> demand() const;

  const VertexTrie& live() const { return live_; }
  const EdgeSet& removed() const { return removed_; }
  bool edge_live(std::uint64_t key) const;
  std::uint64_t L() const { return L_; }
  // max(k, L) * 20^depth, saturating.
  std::uint64_t level_load(int depth) const;
  std::uint64_t congestion_bound() const { return level_load(g_->d()); }
  std::uint64_t length_bound() const;
  std::int64_t threshold(Cluster c, int i, int j) const;

  const RecourseStats& recourse() const { return stats_; }
  // Empty when every balancer is floor/ceil and every split obeys its threshold.
  std::string check_invariants() const;
  // Per (cluster, i<j): base and overflow sizes.
  std::size_t base_size(Cluster c, int i, int j) const;
  std::size_t overflow_size(Cluster c, int i, int j) const;

 private:
  using Balancer = LoadBalancer<RecursiveId, std::uint64_t>;
  using Pair = std::pair<Vertex, Vertex>;
  using PairMap = std::map<RecursiveId, Pair>;
  using EdgeLists = std::unordered_map<std::uint32_t, std::vector<std::uint64_t>>;

  struct Split {
    std::set<RecursiveId> base;
    std::set<RecursiveId> ovf;
  };
  struct Node {
    PairMap demand;  // D_s
    PairMap dir;     // D^dir_s with the endpoints its direct edge connects
    std::vector<Split> split;  // indexed i*k+j, i<j
  };

  std::set<RecursiveId> rec_update(Cluster c, const EdgeLists& ep, const EdgeLists& em, const PairMap& dp,
                                   const PairMap& dm);
  void get_path_into(Cluster c, Vertex a, Vertex b, RecursiveId id, Path& out) const;
  Node& node(Cluster c);
  const Node* find_node(Cluster c) const;
  Balancer& ovf_lb(Cluster c, int i);
  const Balancer& ovf_lb(Cluster c, int i) const;
  Balancer& dir_lb(Cluster c, int i, int j);
  const Balancer& dir_lb(Cluster c, int i, int j) const;
  // Endpoint of edge inside child cluster ch first.
  Pair orient(std::uint64_t key, Cluster ch) const;
  std::int64_t threshold_for(int depth, std::size_t edges) const;

  const SemiHypercube* g_;
  Tau tau_;
  std::uint64_t L_;
  Mode mode_;
  int k_;
  int d_;
  VertexTrie live_;
  EdgeSet removed_;
  std::map<std::uint64_t, DemandPair> root_demand_;
  std::vector<Node> nodes_;
  std::vector<Balancer> ovf_;
  std::vector<Balancer> dir_;
  RecourseStats stats_;
};

}  // namespace shc
