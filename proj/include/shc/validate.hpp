#pragma once

#include <string>
#include <vector>

#include "shc/core.hpp"

namespace shc {

// Threshold tau as an exact rational num/den.
struct Tau {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool strict_mode = false;

  static Tau strict(int d) { return {1, 4350ULL * static_cast<std::uint64_t>(d), true}; }
  static Tau of(std::uint64_t num, std::uint64_t den) { return {num, den, false}; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // tau * a / b, exact.
  Tau scaled(std::uint64_t a, std::uint64_t b) const { return {num * a, den * b, strict_mode}; }
  // Throws when strict_mode is set and tau > 1/(4350 d).
  void check(int d) const;
};

Tau parse_tau(const std::string& text);
std::string to_string(const Tau& t);

// 0 < size < (1 - tau) * full.
inline bool critical_size(std::uint64_t size, std::uint64_t full, const Tau& tau) {
  if (size == 0) return false;
  return static_cast<unsigned __int128>(size) * tau.den <
         static_cast<unsigned __int128>(tau.den - tau.num) * full;
}

bool is_tau_critical(const VertexTrie& live, Cluster c, const Tau& tau);

enum class ViolationKind { MultipleCriticalChildren, LowAverageDegree };

struct Violation {
  Cluster cluster;
  ViolationKind kind;
  // MultipleCriticalChildren: count = number of critical children.
  // LowAverageDegree: edges, kprime, size of the critical child.
  std::uint64_t count = 0;
  std::uint64_t edges = 0;
  std::uint64_t kprime = 0;
  std::uint64_t size = 0;
  int critical_child = -1;
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;
};

// Edges in `removed` (edge_key form) are treated as absent.
ValidityReport validate(const SemiHypercube& g, const VertexTrie& live, const Tau& tau,
                        const EdgeSet* removed = nullptr);
bool is_noncritical_shc(const VertexTrie& live, const Tau& tau);

Cluster home_cluster(const VertexTrie& live, const Tau& tau, Vertex v);
int isolation(const VertexTrie& live, const Tau& tau, Vertex v);
int cluster_isolation(const VertexTrie& live, const Tau& tau, Cluster c);
int crit_count(const VertexTrie& live, const Tau& tau, Vertex v);
int max_isolation(int d);

// Non-leaf cluster with exactly one nonempty child. Leaves never are.
bool is_degenerate(const VertexTrie& live, Cluster c);
Cluster representative(const VertexTrie& live, Cluster c);

std::string violation_json(const Universe& u, const Violation& v);

}  // namespace shc
