#include <doctest.h>

#include "shc/balance.hpp"
#include "shc/rng.hpp"

using namespace shc;

using LB = LoadBalancer<std::uint64_t, std::uint64_t>;
using Ids = std::set<std::uint64_t>;

TEST_CASE("balancer examples") {
  LB lb;
  auto r = lb.update({1, 2, 3}, {}, {10, 20}, {});
  CHECK(lb.check().empty());
  CHECK(lb.load_target() == 1);
  CHECK(lb.high().size() == 1);
  CHECK(r.added == Ids{1, 2, 3});
  CHECK(r.removed.empty());
  std::uint64_t big = lb.clients_of(10).size() == 2 ? 10 : 20;
  std::uint64_t other = big == 10 ? 20 : 10;
  REQUIRE(lb.clients_of(big).size() == 2);

  auto r2 = lb.update({}, {}, {}, {big});
  CHECK(lb.check().empty());
  CHECK(lb.clients_of(other).size() == 3);
  CHECK(r2.added.size() == 2);
  CHECK(r2.removed.size() == 2);
  CHECK(r2.added.size() + r2.removed.size() <= balance_recourse_bound(3, 2, 0, 0, 0, 1));
  for (auto [c, e] : r2.previous) CHECK(e == big);

  auto snapshot = lb.assignment();
  auto r3 = lb.update({}, {}, {}, {});
  CHECK(r3.added.empty());
  CHECK(r3.removed.empty());
  CHECK(r3.previous.empty());
  CHECK(lb.assignment() == snapshot);
}

TEST_CASE("balancer contract errors leave state untouched") {
  LB lb;
  lb.update({1, 2}, {}, {7}, {});
  auto snapshot = lb.assignment();
  CHECK_THROWS_AS(lb.update({}, {9}, {}, {}), BalanceError);
  CHECK_THROWS_AS(lb.update({}, {}, {}, {8}), BalanceError);
  CHECK_THROWS_AS(lb.update({}, {}, {7}, {}), BalanceError);
  CHECK_THROWS_AS(lb.update({1}, {}, {}, {}), BalanceError);
  CHECK_THROWS_AS(lb.update({}, {}, {}, {7}), BalanceError);
  CHECK(lb.assignment() == snapshot);
  CHECK_THROWS_AS(lb.bucket_of(5), BalanceError);
  CHECK_NOTHROW(lb.update({}, {1, 2}, {}, {7}));
  CHECK(lb.client_count() == 0);
  CHECK(lb.bucket_count() == 0);
}

TEST_CASE("balancer fuzz") {
  LB lb;
  Rng rng(12345);
  Ids clients, buckets;
  std::uint64_t next_client = 1, next_bucket = 1;
  for (int step = 0; step < 20000; ++step) {
    Ids ip, im, ep, em;
    std::uint64_t ops = 1 + rng.below(4);
    for (std::uint64_t o = 0; o < ops; ++o) {
      switch (rng.below(4)) {
        case 0:
          ip.insert(next_client++);
          break;
        case 1:
          if (!clients.empty()) {
            auto it = std::next(clients.begin(), static_cast<std::ptrdiff_t>(rng.below(clients.size())));
            if (!ip.count(*it)) im.insert(*it);
          }
          break;
        case 2:
          ep.insert(next_bucket++);
          break;
        default:
          if (buckets.size() > 1) {
            auto it = std::next(buckets.begin(), static_cast<std::ptrdiff_t>(rng.below(buckets.size())));
            em.insert(*it);
          }
      }
    }
    std::size_t after_buckets = buckets.size() - em.size() + ep.size();
    if (after_buckets == 0) ep.insert(next_bucket++);
    std::uint64_t I = clients.size(), E = buckets.size();
    auto r = lb.update(ip, im, ep, em);
    REQUIRE(lb.check().empty());
    for (auto c : im) clients.erase(c);
    clients.insert(ip.begin(), ip.end());
    for (auto e : em) buckets.erase(e);
    buckets.insert(ep.begin(), ep.end());
    Ids have;
    for (auto& [c, e] : lb.assignment()) have.insert(c);
    REQUIRE(have == clients);
    for (auto c : ip) REQUIRE(r.added.count(c));
    for (auto c : im) REQUIRE(r.removed.count(c));
    Ids dom;
    for (auto& [c, e] : r.previous) dom.insert(c);
    REQUIRE(dom == r.removed);
    REQUIRE(r.added.size() + r.removed.size() <= balance_recourse_bound(I, E, ip.size(), im.size(), ep.size(), em.size()));
    REQUIRE(lb.high().size() == clients.size() % buckets.size());
  }
}
