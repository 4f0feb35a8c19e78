#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "shc/rng.hpp"

namespace shc {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = 0xffffffffu;

// Default cap on k^d. Overridable per call.
inline constexpr std::uint64_t kDefaultSizeGuard = std::uint64_t{1} << 22;

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPresentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyClusterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A cluster is a label prefix. `prefix` holds the first `depth` digits as a
// base-k number; digits are 0-based internally and 1-based in text.
struct Cluster {
  int depth = 0;
  std::uint32_t prefix = 0;

  friend bool operator==(const Cluster&, const Cluster&) = default;
  friend auto operator<=>(const Cluster&, const Cluster&) = default;
};

// Label arithmetic for [k]^d. Vertex v is the base-k number of its label, the
// depth-0 digit being the most significant.
class Universe {
 public:
  Universe() = default;
  Universe(int k, int d, std::uint64_t size_guard = kDefaultSizeGuard);

  int k() const { return k_; }
  int d() const { return d_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t pow(int e) const { return pow_[static_cast<std::size_t>(e)]; }

  int digit(Vertex v, int depth) const { return static_cast<int>((v / pow_[d_ - 1 - depth]) % k_); }
  Cluster ancestor(Vertex v, int depth) const { return {depth, v / pow_[d_ - depth]}; }
  Cluster leaf(Vertex v) const { return {d_, v}; }
  Cluster root() const { return {0, 0}; }
  Cluster child(Cluster c, int i) const { return {c.depth + 1, c.prefix * static_cast<std::uint32_t>(k_) + static_cast<std::uint32_t>(i)}; }
  Cluster parent(Cluster c) const { return {c.depth - 1, c.prefix / static_cast<std::uint32_t>(k_)}; }
  int last_digit(Cluster c) const { return static_cast<int>(c.prefix % static_cast<std::uint32_t>(k_)); }
  bool contains(Cluster c, Vertex v) const { return v / pow_[d_ - c.depth] == c.prefix; }
  bool is_ancestor(Cluster a, Cluster c) const {
    return a.depth <= c.depth && c.prefix / pow_[c.depth - a.depth] == a.prefix;
  }
  // Initial cluster size k^{d-|c|} and its first vertex.
  std::uint32_t full_size(Cluster c) const { return pow_[d_ - c.depth]; }
  Vertex first_vertex(Cluster c) const { return c.prefix * pow_[d_ - c.depth]; }
  // Child of c that contains v (v must lie in c, |c| < d).
  int child_index(Cluster c, Vertex v) const { return digit(v, c.depth); }

  int lcp_depth(Vertex u, Vertex v) const;
  Cluster lcp(Vertex u, Vertex v) const { return ancestor(u, lcp_depth(u, v)); }

  // Dense index over all clusters, root first, then depth 1, and so on.
  std::uint32_t flat(Cluster c) const { return offset_[static_cast<std::size_t>(c.depth)] + c.prefix; }
  std::uint32_t cluster_count() const { return offset_.back(); }
  std::uint32_t clusters_at(int depth) const { return pow_[depth]; }

  std::string label(Vertex v) const;
  std::string label(Cluster c) const;
  Vertex parse_vertex(std::string_view s) const;
  Cluster parse_cluster(std::string_view s) const;

  friend bool operator==(const Universe& a, const Universe& b) { return a.k_ == b.k_ && a.d_ == b.d_; }

 private:
  int k_ = 0;
  int d_ = 0;
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> pow_;
  std::vector<std::uint32_t> offset_;
};

inline std::uint64_t edge_key(Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  return (std::uint64_t{u} << 32) | v;
}
inline Vertex edge_lo(std::uint64_t key) { return static_cast<Vertex>(key >> 32); }
inline Vertex edge_hi(std::uint64_t key) { return static_cast<Vertex>(key & 0xffffffffu); }

using EdgeSet = std::unordered_set<std::uint64_t>;

// Static edge universe: a perfect matching between every pair of child
// clusters of every cluster. Immutable after construction.
class SemiHypercube {
 public:
  SemiHypercube() = default;
  explicit SemiHypercube(Universe u);

  const Universe& universe() const { return u_; }
  int k() const { return u_.k(); }
  int d() const { return u_.d(); }
  std::uint32_t n() const { return u_.n(); }

  // Matched partner of v in child `sibling` of v's depth-`depth` ancestor.
  // kNoVertex when sibling is v's own digit.
  Vertex partner(Vertex v, int depth, int sibling) const {
    return nbr_[static_cast<std::size_t>(v) * stride_ + static_cast<std::size_t>(sibling + u_.k() * depth)];
  }
  bool adjacent(Vertex u, Vertex v) const;

  // Position-indexed view of E_{c,i,j}: entry q is the position in child j
  // matched to position q of child i.
  std::vector<std::uint32_t> matching(Cluster c, int i, int j) const;

  // All edges as (u, v) with u < v, in increasing order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  // Fills one slot pair. Used by builders and the loader.
  void set_partner(Vertex u, Vertex v);
  // Throws FormatError unless every matching is perfect.
  void check_matchings() const;

 private:
  Universe u_;
  std::size_t stride_ = 0;
  std::vector<Vertex> nbr_;
};

SemiHypercube build_random_shc(int k, int d, std::uint64_t seed,
                               std::uint64_t size_guard = kDefaultSizeGuard);
SemiHypercube build_hypercube_style(int k, int d,
                                    std::uint64_t size_guard = kDefaultSizeGuard);

// Live vertex set with per-cluster subtree sizes.
class VertexTrie {
 public:
  VertexTrie() = default;
  explicit VertexTrie(const Universe& u, bool full = true);

  const Universe& universe() const { return u_; }
  bool contains(Vertex v) const { return v < alive_.size() && alive_[v] != 0; }
  std::uint32_t size(Cluster c) const { return size_[u_.flat(c)]; }
  std::uint32_t size() const { return size_[0]; }
  bool empty(Cluster c) const { return size(c) == 0; }

  void remove(Vertex v);
  void insert(Vertex v);

  Vertex sample(Cluster c, Rng& rng) const;
  // Live vertices of c in increasing order.
  std::vector<Vertex> members(Cluster c) const;
  template <class F>
  void for_each(Cluster c, F&& f) const {
    Vertex lo = u_.first_vertex(c);
    Vertex hi = lo + u_.full_size(c);
    for (Vertex v = lo; v < hi; ++v)
      if (alive_[v]) f(v);
  }

 private:
  Universe u_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint8_t> alive_;
};

std::optional<Vertex> edge_to_sibling(const SemiHypercube& g, const VertexTrie& live, Vertex v,
                                      int depth, int sibling);

// Number of live neighbours of v outside its own child of ancestor(v, depth)
// but inside that ancestor (the cluster-level degree used by the definitions).
int cluster_degree(const SemiHypercube& g, const VertexTrie& live, Vertex v, int depth);

}  // namespace shc
