#pragma once

#include <cstdint>
#include <vector>

#include "shc/core.hpp"
#include "shc/dynroute.hpp"
#include "shc/validate.hpp"

namespace shc {

// Closed forms for the hard family: s_m = k * 2^floor((m - d0)/2), c_m = k.
struct HardFamilySpec {
  int k = 0;
  int d = 0;
  int d0 = 0;
  Tau tau;
  std::uint64_t hard_size(int m) const;
  std::uint64_t cut_size(int /*m*/) const { return static_cast<std::uint64_t>(k); }
  // Levels with m - d0 even are "bad", the others "spread".
  bool is_bad(int m) const { return (m - d0) % 2 == 0; }
};

struct HardLevel {
  int m = 0;          // dimension of the sub-instance
  Cluster cluster;    // where it sits
  bool bad = false;
  std::uint64_t hard = 0;  // measured |hard| inside the cluster
  std::uint64_t cut = 0;   // measured edges from hard to the rest of the cluster
};

struct HardInstance {
  HardFamilySpec spec;
  SemiHypercube g;
  VertexTrie live;
  EdgeSet removed;           // matching edges the instance leaves out
  std::vector<Vertex> hard;  // sorted
  std::vector<HardLevel> levels;  // from m = d down to d0
};

// Throws std::invalid_argument on k < 2, d0 < 2, d < d0, tau < 1/k, or when a
// level would need more than k cliques.
HardInstance build_hard_instance(int k, int d, int d0, Tau tau,
                                 std::uint64_t size_guard = kDefaultSizeGuard);

// Live neighbours over surviving edges.
std::uint64_t instance_degree(const HardInstance& h, Vertex v);
std::uint64_t measured_cut(const HardInstance& h);

struct HardDemand {
  std::vector<DemandPair> pairs;
  std::uint64_t crossing = 0;  // pairs with exactly one hard endpoint
  std::uint64_t cut = 0;
  // crossing / cut as an exact fraction.
  std::uint64_t ratio_num() const { return crossing; }
  std::uint64_t ratio_den() const { return cut; }
  double ratio() const { return cut == 0 ? 0.0 : static_cast<double>(crossing) / static_cast<double>(cut); }
};

// Every hard vertex sends one unit per incident edge to non-hard vertices,
// filling their degrees in increasing order. load(v) <= deg(v) throughout.
HardDemand hard_demand(const HardInstance& h);

}  // namespace shc
