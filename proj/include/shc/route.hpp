#pragma once

#include <map>
#include <optional>
#include <vector>

#include "shc/core.hpp"
#include "shc/validate.hpp"

namespace shc {

// Vertex sequence; a single vertex is the empty path.
using Path = std::vector<Vertex>;

struct SamplingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kNoncriticalAttemptCap = 64;
inline int escape_attempt_cap(int k) { return 128 * k; }

std::optional<Path> greedy_path(const SemiHypercube& g, const VertexTrie& live, Vertex s, Vertex t);

struct ReachSet {
  Vertex target = kNoVertex;
  Cluster cluster;
  std::vector<Vertex> members;
};

// Exact: runs greedy_path from every live s in c.
ReachSet reach_set_oracle(const SemiHypercube& g, const VertexTrie& live, Vertex t, Cluster c);

struct SampledPath {
  Path path;
  int attempts = 0;
};

SampledPath sample_noncritical_path(const SemiHypercube& g, const VertexTrie& live, Vertex s,
                                    Vertex t, Rng& rng);

// Per-call trace for checking the isolation descent.
struct EscapeTrace {
  std::vector<int> isolation;  // iso of each vertex Escape recursed on, in order
  int attempts = 0;
};

Path escape(const SemiHypercube& g, const VertexTrie& live, const Tau& tau, Vertex s, Rng& rng,
            EscapeTrace* trace = nullptr);

struct SamplePathResult {
  Path path;
  int midpoint_attempts = 0;
  EscapeTrace escape_s;
  EscapeTrace escape_t;
};

SamplePathResult sample_path(const SemiHypercube& g, const VertexTrie& live, const Tau& tau,
                             Vertex s, Vertex t, Rng& rng);

// True when consecutive vertices are live and adjacent (and not in removed).
bool path_is_valid(const SemiHypercube& g, const VertexTrie& live, const Path& p,
                   const EdgeSet* removed = nullptr);

struct CongestionMap {
  std::map<std::uint64_t, std::uint64_t> count;  // edge_key -> paths through it
  std::uint64_t max = 0;
  std::uint64_t total = 0;
  double mean() const { return count.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(count.size()); }
  void add(const Path& p);
};

CongestionMap measure_congestion(const std::vector<Path>& paths);

}  // namespace shc
