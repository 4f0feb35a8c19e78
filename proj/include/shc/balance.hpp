#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace shc {

struct BalanceError : std::logic_error {
  using std::logic_error::logic_error;
};

// ceil(i/e) with 0/0 = 0.
inline std::uint64_t ceil_div0(std::uint64_t i, std::uint64_t e) { return e == 0 ? 0 : (i + e - 1) / e; }

// |I+| + 3|I-| + 2 ceil(|I|/|E|) (|E-| + |E+|), using sizes from before the update.
inline std::uint64_t balance_recourse_bound(std::uint64_t clients, std::uint64_t buckets, std::uint64_t ip,
                                            std::uint64_t im, std::uint64_t ep, std::uint64_t em) {
  return ip + 3 * im + 2 * ceil_div0(clients, buckets) * (em + ep);
}

// Assigns clients to buckets so every bucket carries floor or ceil of the
// average load. Arbitrary choices take the lowest identifier.
template <class Client, class Bucket>
class LoadBalancer {
 public:
  struct Result {
    std::set<Client> added;             // I^{A+}
    std::set<Client> removed;           // I^{A-}
    std::map<Client, Bucket> previous;  // B^rem, keyed by removed
  };

  std::uint64_t load_target() const { return L_; }
  std::size_t client_count() const { return assign_.size(); }
  std::size_t bucket_count() const { return inv_.size(); }
  bool has_client(const Client& c) const { return assign_.count(c) != 0; }
  bool has_bucket(const Bucket& e) const { return inv_.count(e) != 0; }
  const Bucket& bucket_of(const Client& c) const {
    auto it = assign_.find(c);
    if (it == assign_.end()) throw BalanceError("unknown client");
    return it->second;
  }
  const std::set<Client>& clients_of(const Bucket& e) const {
    auto it = inv_.find(e);
    if (it == inv_.end()) throw BalanceError("unknown bucket");
    return it->second;
  }
  const std::map<Client, Bucket>& assignment() const { return assign_; }
  const std::map<Bucket, std::set<Client>>& buckets() const { return inv_; }
  const std::set<Bucket>& low() const { return low_; }
  const std::set<Bucket>& high() const { return high_; }

  Result update(const std::set<Client>& ip, const std::set<Client>& im, const std::set<Bucket>& ep,
                const std::set<Bucket>& em) {
    // Contract checks before any mutation.
    for (const Bucket& e : em)
      if (!inv_.count(e)) throw BalanceError("removing unknown bucket");
    for (const Bucket& e : ep)
      if (inv_.count(e) && !em.count(e)) throw BalanceError("adding existing bucket");
    for (const Client& c : im)
      if (!assign_.count(c)) throw BalanceError("removing unknown client");
    for (const Client& c : ip)
      if (assign_.count(c) && !im.count(c)) throw BalanceError("adding existing client");
    std::size_t new_clients = assign_.size() - im.size() + ip.size();
    std::size_t new_buckets = inv_.size() - em.size() + ep.size();
    if (new_buckets == 0 && new_clients > 0) throw BalanceError("clients without buckets");

    Result r;
    std::set<Client> pool(ip);
    auto unassign = [&](const Client& c, const Bucket& e) {
      r.removed.insert(c);
      r.previous.emplace(c, e);
      assign_.erase(c);
    };

    // 1. Drop removed buckets; their surviving clients need new homes.
    for (const Bucket& e : em) {
      for (const Client& c : inv_[e]) {
        unassign(c, e);
        if (!im.count(c)) pool.insert(c);
      }
      inv_.erase(e);
      low_.erase(e);
      high_.erase(e);
    }
    // 2. New buckets start empty.
    std::set<Bucket> work;
    for (const Bucket& e : ep) {
      inv_[e];
      work.insert(e);
    }
    // 3. Drop removed clients that still sit in a bucket.
    for (const Client& c : im) {
      auto it = assign_.find(c);
      if (it == assign_.end()) continue;
      Bucket e = it->second;
      inv_[e].erase(c);
      unassign(c, e);
      work.insert(e);
    }
    // 4. New target load; untouched buckets shift class or join the work set.
    std::uint64_t Lnew = inv_.empty() ? 0 : new_clients / inv_.size();
    for (const Bucket& e : work) {
      low_.erase(e);
      high_.erase(e);
    }
    if (Lnew == L_ + 1) {
      work.insert(low_.begin(), low_.end());
      low_ = std::move(high_);
      high_.clear();
    } else if (Lnew + 1 == L_) {
      work.insert(high_.begin(), high_.end());
      high_ = std::move(low_);
      low_.clear();
    } else if (Lnew != L_) {
      work.insert(low_.begin(), low_.end());
      work.insert(high_.begin(), high_.end());
      low_.clear();
      high_.clear();
    }
    L_ = Lnew;
    // 5. Overfull work buckets shed down to L+1.
    for (auto it = work.begin(); it != work.end();) {
      auto& cl = inv_[*it];
      if (cl.size() >= L_ + 1) {
        while (cl.size() > L_ + 1) {
          Client c = *cl.begin();
          cl.erase(cl.begin());
          unassign(c, *it);
          pool.insert(c);
        }
        high_.insert(*it);
        it = work.erase(it);
      } else {
        ++it;
      }
    }
    // 6. Borrow from high buckets when the pool cannot fill the work set.
    std::uint64_t need = 0;
    for (const Bucket& e : work) need += L_ - inv_[e].size();
    if (need > pool.size()) {
      std::uint64_t trim = need - pool.size();
      if (trim > high_.size()) throw BalanceError("internal: not enough high buckets");
      std::vector<Bucket> take(high_.begin(), std::next(high_.begin(), static_cast<std::ptrdiff_t>(trim)));
      for (const Bucket& e : take) {
        auto& cl = inv_[e];
        Client c = *cl.begin();
        cl.erase(cl.begin());
        unassign(c, e);
        pool.insert(c);
        high_.erase(e);
        low_.insert(e);
      }
    }
    r.added = pool;
    auto place = [&](const Bucket& e) {
      Client c = *pool.begin();
      pool.erase(pool.begin());
      assign_[c] = e;
      inv_[e].insert(c);
    };
    // 7. Fill work buckets to L.
    for (const Bucket& e : work) {
      while (inv_[e].size() < L_) {
        if (pool.empty()) throw BalanceError("internal: pool exhausted");
        place(e);
      }
      low_.insert(e);
    }
    // 8. Leftovers go one each to low buckets.
    while (!pool.empty()) {
      if (low_.empty()) throw BalanceError("internal: no low bucket for leftover client");
      Bucket e = *low_.begin();
      place(e);
      low_.erase(low_.begin());
      high_.insert(e);
    }
    return r;
  }

  // Empty string when consistent, otherwise a description of the first fault.
  std::string check() const {
    std::size_t total = 0;
    for (const auto& [e, cl] : inv_) {
      bool lo = low_.count(e) != 0;
      bool hi = high_.count(e) != 0;
      if (lo == hi) return "bucket in neither or both classes";
      if (cl.size() != (lo ? L_ : L_ + 1)) return "bucket load does not match its class";
      for (const Client& c : cl) {
        auto it = assign_.find(c);
        if (it == assign_.end() || !(it->second == e)) return "B and B_inv disagree";
      }
      total += cl.size();
    }
    if (total != assign_.size()) return "client count mismatch";
    if (low_.size() + high_.size() != inv_.size()) return "stale bucket in a class";
    if (!inv_.empty()) {
      if (L_ != assign_.size() / inv_.size()) return "L is not floor(|I|/|E|)";
      if (high_.size() != assign_.size() % inv_.size()) return "|E_high| != |I| mod |E|";
    } else if (!assign_.empty()) {
      return "clients without buckets";
    }
    return {};
  }

 private:
  std::uint64_t L_ = 0;
  std::map<Client, Bucket> assign_;
  std::map<Bucket, std::set<Client>> inv_;
  std::set<Bucket> low_;
  std::set<Bucket> high_;
};

}  // namespace shc
