#pragma once

#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "shc/core.hpp"
#include "shc/validate.hpp"

namespace shc {

enum class Mode { Strict, Experimental };

using Rational = boost::multiprecision::cpp_rational;

Rational harmonic(int k);
// ceil(2 * H_k * (2d+1) / tau)
std::uint64_t strict_rho(int k, int d, const Tau& tau);
// ceil(3 * d * H_k / tau), the reference pruner's multiplier
std::uint64_t reference_rho(int k, int d, const Tau& tau);
// (rho+1)^d - 1, saturating at UINT64_MAX
std::uint64_t pruning_ratio_bound(std::uint64_t rho, int d);

struct PrunerOptions {
  Mode mode = Mode::Strict;
  std::optional<std::uint64_t> rho;  // experimental override
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Worst-case self-pruning with shadow mark sets. Child indices are 0-based;
// the initial target is child 0.
class Pruner {
 public:
  struct MarkInfo {
    int anc_depth = -1;  // -1 means no marks
    int j = 0;
    friend bool operator==(const MarkInfo&, const MarkInfo&) = default;
  };

  Pruner(const SemiHypercube& g, Tau tau, PrunerOptions opt = {});

  // Deletes v and returns the pruned vertices (v excluded), in removal order.
  std::vector<Vertex> remove(Vertex v);

  // Internal steps, exposed for tests.
  Vertex trim(Cluster c);
  void retarget(Cluster c);
  void process_removal(Vertex v);

  const SemiHypercube& graph() const { return *g_; }
  const Universe& universe() const { return g_->universe(); }
  const VertexTrie& live() const { return live_; }
  const Tau& tau() const { return tau_; }
  Mode mode() const { return opt_.mode; }
  std::uint64_t rho() const { return rho_; }
  int rcycle() const { return rcycle_; }

  int target(Cluster c) const { return target_[universe().flat(c)]; }
  bool untargeted(Cluster c, int i) const { return s_[universe().flat(c) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(i)] != 0; }
  int untargeted_count(Cluster c) const { return s_count_[universe().flat(c)]; }
  MarkInfo minfo(Cluster c) const { return minfo_[universe().flat(c)]; }

  // M^shadow_{c, ancestor at anc_depth, j}; empty when never populated.
  const std::set<Vertex>& shadow(Cluster c, int anc_depth, int j) const;
  // |M^shadow_{c, minfo_c}|
  std::size_t marked_count(Cluster c) const;
  std::size_t shadow_key_count() const { return shadow_.size(); }

 private:
  std::uint64_t key(Cluster c, int anc_depth, int j) const;
  std::set<Vertex>& shadow_mut(Cluster c, int anc_depth, int j);
  std::size_t shadow_size(Cluster c, MarkInfo m) const;

  const SemiHypercube* g_;
  Tau tau_;
  PrunerOptions opt_;
  int k_;
  int d_;
  int rcycle_;
  std::uint64_t rho_;
  VertexTrie live_;
  std::vector<int> target_;
  std::vector<std::uint8_t> s_;
  std::vector<int> s_count_;
  std::vector<MarkInfo> minfo_;
  std::unordered_map<std::uint64_t, std::set<Vertex>> shadow_;
};

// Reference pruner with explicit mark sets. The initial target is the last
// child.
class ReferencePruner {
 public:
  ReferencePruner(const SemiHypercube& g, Tau tau, PrunerOptions opt = {});

  std::vector<Vertex> remove(Vertex v);

  const VertexTrie& live() const { return live_; }
  std::uint64_t rho() const { return rho_; }
  int target(Cluster c) const { return target_[g_->universe().flat(c)]; }
  const std::set<Vertex>& marks(Cluster c) const { return marks_[g_->universe().flat(c)]; }
  // k' recorded when the current target was chosen with several nonempty
  // children; -1 after a single-child hand-down.
  int epoch_kprime(Cluster c) const { return epoch_kprime_[g_->universe().flat(c)]; }

 private:
  void mark(Cluster c, const std::vector<Vertex>& add);
  void retarget(Cluster c);
  Vertex trim(Cluster c);
  std::vector<Vertex> low_degree(Cluster parent, int child, int kprime, bool skip_marked) const;

  const SemiHypercube* g_;
  Tau tau_;
  int k_;
  int d_;
  std::uint64_t rho_;
  VertexTrie live_;
  std::vector<int> target_;
  std::vector<std::set<Vertex>> marks_;
  std::vector<int> epoch_kprime_;
};

// Amortized pruning in b batches; after batch i no cluster is
// (tau*i/b)-critical.
class BatchedPruner {
 public:
  BatchedPruner(const Universe& u, Tau tau, int batches);

  // Returns pruned vertices (deleted ones excluded), sorted.
  std::vector<Vertex> batch_remove(const std::vector<Vertex>& del);

  const VertexTrie& live() const { return live_; }
  int batches_done() const { return done_; }
  int budget() const { return b_; }
  Tau current_tau() const { return tau_.scaled(static_cast<std::uint64_t>(done_), static_cast<std::uint64_t>(b_)); }
  // ((b/tau)^d - 1) * deleted >= pruned, exact.
  bool ratio_ok(std::uint64_t pruned, std::uint64_t deleted) const;

 private:
  void process(Cluster c, std::vector<Vertex>::const_iterator lo, std::vector<Vertex>::const_iterator hi,
               const Tau& t, std::vector<Vertex>& removed);

  Universe u_;
  Tau tau_;
  int b_;
  int done_ = 0;
  VertexTrie live_;
};

}  // namespace shc
