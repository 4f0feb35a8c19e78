#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "shc/core.hpp"
#include "shc/dynroute.hpp"
#include "shc/prune.hpp"
#include "shc/route.hpp"

namespace shc {

// Undirected host graph on vertices 0..n-1.
struct HostGraph {
  std::uint32_t n = 0;
  EdgeSet edges;
  bool has_edge(Vertex u, Vertex v) const { return u != v && edges.count(edge_key(u, v)) != 0; }
};

// Semi-hypercube H embedded into a host: each H vertex sits on a host
// vertex and each H edge maps to a simple host path between them. Paths are
// stored from host_of[edge_lo] to host_of[edge_hi].
struct Embedding {
  SemiHypercube h;
  HostGraph host;
  std::vector<Vertex> host_of;
  std::map<std::uint64_t, Path> paths;
};

// Throws FormatError naming the first offending edge or vertex: a path with
// wrong endpoints, a repeated vertex, a missing host edge, a missing H edge,
// or a host vertex no path covers.
void check_embedding(const Embedding& e);

// Host equals H; every path is the edge itself.
Embedding identity_embedding(const SemiHypercube& h);
// Host is H with `extra` randomly chosen H edges subdivided by one new host
// vertex each; those edges map to the two-edge path through it.
Embedding subdivided_embedding(const SemiHypercube& h, std::uint32_t extra, std::uint64_t seed);

// max_e |U_e| and the longest path (in edges) of a fresh embedding.
std::uint64_t embedding_congestion(const Embedding& e);
std::uint64_t embedding_dilation(const Embedding& e);

inline constexpr std::uint64_t kNoEdge = ~std::uint64_t{0};

struct EmbedOptions {
  std::optional<Tau> tau;  // 1/(4350 d) when unset
  PrunerOptions pruner{};
};

struct EmbedStep {
  std::vector<Vertex> aff;     // H vertices, V^aff
  std::vector<Vertex> vminus;  // H vertices leaving V''
  std::vector<std::uint64_t> eminus;  // H edges leaving E''
  std::vector<Vertex> trim;    // host vertices leaving V'
  std::vector<Vertex> reconnected;  // host vertices whose connecting edge changed
};

// Keeps a pruned semi-hypercube H[V''] whose embedded paths survive host
// edge deletions, plus a connecting path for every remaining host vertex.
class EmbedPruner {
 public:
  EmbedPruner(const Embedding& e, EmbedOptions opt = {});

  EmbedStep prune_step(Vertex u, Vertex v);

  bool host_alive(Vertex v) const { return alive_[v] != 0; }
  bool host_edge_alive(Vertex u, Vertex v) const;
  std::uint32_t host_alive_count() const { return alive_count_; }
  const VertexTrie& core() const { return pruner_.live(); }
  const Pruner& pruner() const { return pruner_; }
  const Tau& tau() const { return tau_; }
  const Embedding& embedding() const { return *e_; }
  std::uint64_t kappa() const { return kappa_; }
  std::uint64_t dilation() const { return h_; }

  // Host vertex of V'' that v is attached to.
  Vertex rep(Vertex v) const;
  // H vertex behind rep(v).
  Vertex rep_h(Vertex v) const;
  // Host path from v to rep(v); a single vertex when v is in V''.
  Path connection(Vertex v) const;
  // Host path for an H path, concatenating edge paths.
  Path project(const Path& hp) const;
  Path sample_path(Vertex u, Vertex v, Rng& rng) const;
  bool host_path_valid(const Path& p) const;

  const std::set<std::uint64_t>& covering(Vertex v) const { return uv_[v]; }
  std::uint64_t conn(Vertex v) const { return conn_[v]; }

  // Full recomputation of U_v, U_e, coverage and conn. Empty when consistent.
  std::string check_invariants() const;

 private:
  bool in_core_edge(std::uint64_t hkey) const;
  Path oriented(std::uint64_t hkey, Vertex from_h) const;

  const Embedding* e_;
  Tau tau_;
  Pruner pruner_;
  std::vector<Vertex> h_of_;  // host -> H vertex or kNoVertex
  std::vector<std::uint8_t> alive_;
  std::uint32_t alive_count_ = 0;
  EdgeSet host_removed_;
  std::vector<std::set<std::uint64_t>> uv_;
  std::unordered_map<std::uint64_t, std::set<std::uint64_t>> ue_;
  std::vector<std::uint64_t> conn_;
  std::uint64_t kappa_ = 0;
  std::uint64_t h_ = 0;
};

// EmbedPruner plus a dynamic router on H[V''] for demand between host
// vertices. Each pair is routed in H between the representatives of its
// endpoints; changes queue up until reroute_step hands them to the router.
class EmbedRouter {
 public:
  EmbedRouter(const Embedding& e, const std::vector<DemandPair>& demand, std::uint64_t L, EmbedOptions opt = {},
              Mode router_mode = Mode::Experimental);

  EmbedStep prune_step(Vertex u, Vertex v);
  // Pairs in dminus must exist; dplus endpoints must be live host vertices.
  // Returns ids whose host path changed since the previous reroute.
  std::set<std::uint64_t> reroute_step(const std::vector<DemandPair>& dplus, const std::vector<DemandPair>& dminus);

  Path get_path(std::uint64_t id) const;
  const std::map<std::uint64_t, DemandPair>& demand() const { return demand_; }
  const EmbedPruner& pruner() const { return pruner_; }
  const DynamicRouter& router() const { return router_; }
  // L scaled by how many host vertices can share one representative.
  std::uint64_t projected_load() const { return lproj_; }
  bool pending() const { return !pend_minus_.empty() || !pend_plus_.empty() || !pend_v_.empty(); }

 private:
  DemandPair projected(const DemandPair& p) const;

  EmbedPruner pruner_;
  std::uint64_t L_;
  std::uint64_t lproj_;
  DynamicRouter router_;
  std::map<std::uint64_t, DemandPair> demand_;  // host endpoints
  std::map<std::uint64_t, DemandPair> proj_;    // as held by the router
  std::set<std::uint64_t> pend_minus_;
  std::map<std::uint64_t, DemandPair> pend_plus_;
  std::set<Vertex> pend_v_;
  std::set<std::uint64_t> dirty_;  // ids touched since the last reroute
};

}  // namespace shc
