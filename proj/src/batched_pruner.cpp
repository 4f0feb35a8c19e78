#include "shc/prune.hpp"

#include <algorithm>

namespace shc {

BatchedPruner::BatchedPruner(const Universe& u, Tau tau, int batches) : u_(u), tau_(tau), b_(batches), live_(u) {
  tau_.check(u.d());
  if (batches < 1) throw std::invalid_argument("batch budget must be positive");
}

bool BatchedPruner::ratio_ok(std::uint64_t pruned, std::uint64_t deleted) const {
  using boost::multiprecision::cpp_int;
  cpp_int pd = 1;
  cpp_int bqd = 1;
  for (int i = 0; i < u_.d(); ++i) {
    pd *= tau_.num;
    bqd *= cpp_int(b_) * tau_.den;
  }
  return cpp_int(pruned) * pd <= (bqd - pd) * cpp_int(deleted);
}

void BatchedPruner::process(Cluster c, std::vector<Vertex>::const_iterator lo, std::vector<Vertex>::const_iterator hi,
                            const Tau& t, std::vector<Vertex>& removed) {
  if (c.depth == u_.d()) return;
  // Children first; del is sorted so each child owns a contiguous run.
  while (lo != hi) {
    int i = u_.digit(*lo, c.depth);
    auto mid = std::find_if(lo, hi, [&](Vertex v) { return u_.digit(v, c.depth) != i; });
    process(u_.child(c, i), lo, mid, t, removed);
    lo = mid;
  }
  if (is_tau_critical(live_, c, t)) {
    for (Vertex v : live_.members(c)) {
      live_.remove(v);
      removed.push_back(v);
    }
  }
}

std::vector<Vertex> BatchedPruner::batch_remove(const std::vector<Vertex>& del) {
  if (done_ >= b_) throw std::logic_error("batch budget exhausted");
  std::vector<Vertex> sorted(del);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Vertex v : sorted)
    if (!live_.contains(v)) throw NotPresentError("batch delete of absent vertex " + u_.label(v));
  for (Vertex v : sorted) live_.remove(v);
  ++done_;
  std::vector<Vertex> removed;
  process(u_.root(), sorted.cbegin(), sorted.cend(), current_tau(), removed);
  std::sort(removed.begin(), removed.end());
  return removed;
}

}  // namespace shc
