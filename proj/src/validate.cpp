#include "shc/validate.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace shc {

void Tau::check(int d) const {
  if (den == 0 || num == 0 || num >= den) throw std::invalid_argument("tau must lie in (0,1)");
  if (strict_mode &&
      static_cast<unsigned __int128>(num) * 4350u * static_cast<unsigned>(d) > den)
    throw std::invalid_argument("strict mode requires tau <= 1/(4350 d), got " + to_string(*this));
}

Tau parse_tau(const std::string& text) {
  auto slash = text.find('/');
  Tau t;
  if (slash != std::string::npos) {
    t.num = std::stoull(text.substr(0, slash));
    t.den = std::stoull(text.substr(slash + 1));
  } else {
    // Decimal: scale to an exact rational over 10^digits.
    auto dot = text.find('.');
    std::string digits = text;
    std::uint64_t den = 1;
    if (dot != std::string::npos) {
      digits = text.substr(0, dot) + text.substr(dot + 1);
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    }
    t.num = std::stoull(digits);
    t.den = den;
  }
  if (t.den == 0) throw std::invalid_argument("tau denominator is zero");
  std::uint64_t g = std::gcd(t.num, t.den);
  if (g > 1) {
    t.num /= g;
    t.den /= g;
  }
  return t;
}

std::string to_string(const Tau& t) { return std::to_string(t.num) + "/" + std::to_string(t.den); }

bool is_tau_critical(const VertexTrie& live, Cluster c, const Tau& tau) {
  return critical_size(live.size(c), live.universe().full_size(c), tau);
}

ValidityReport validate(const SemiHypercube& g, const VertexTrie& live, const Tau& tau,
                        const EdgeSet* removed) {
  const Universe& u = g.universe();
  ValidityReport rep;
  for (int depth = 0; depth < u.d(); ++depth) {
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      if (live.empty(c)) continue;
      int crit = 0;
      int t = -1;
      std::uint64_t kprime = 0;
      for (int i = 0; i < u.k(); ++i) {
        Cluster ch = u.child(c, i);
        if (is_tau_critical(live, ch, tau)) {
          ++crit;
          t = i;
        } else if (!live.empty(ch)) {
          ++kprime;
        }
      }
      if (crit > 1) {
        Violation v{c, ViolationKind::MultipleCriticalChildren};
        v.count = static_cast<std::uint64_t>(crit);
        rep.violations.push_back(v);
        continue;
      }
      if (crit == 0) continue;
      Cluster tc = u.child(c, t);
      std::uint64_t edges = 0;
      live.for_each(tc, [&](Vertex x) {
        for (int i = 0; i < u.k(); ++i) {
          if (i == t) continue;
          Vertex w = g.partner(x, depth, i);
          if (!live.contains(w)) continue;
          if (removed && removed->count(edge_key(x, w))) continue;
          ++edges;
        }
      });
      std::uint64_t sz = live.size(tc);
      if (10 * edges < 9 * kprime * sz) {
        Violation v{c, ViolationKind::LowAverageDegree};
        v.edges = edges;
        v.kprime = kprime;
        v.size = sz;
        v.critical_child = t;
        rep.violations.push_back(v);
      }
    }
  }
  rep.valid = rep.violations.empty();
  return rep;
}

bool is_noncritical_shc(const VertexTrie& live, const Tau& tau) {
  const Universe& u = live.universe();
  for (int depth = 0; depth <= u.d(); ++depth)
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p)
      if (is_tau_critical(live, {depth, p}, tau)) return false;
  return true;
}

namespace {
void require_live(const VertexTrie& live, Vertex v) {
  if (!live.contains(v)) throw NotPresentError("vertex not present: " + live.universe().label(v));
}
}  // namespace

Cluster home_cluster(const VertexTrie& live, const Tau& tau, Vertex v) {
  require_live(live, v);
  const Universe& u = live.universe();
  for (int depth = u.d(); depth >= 0; --depth) {
    Cluster c = u.ancestor(v, depth);
    if (is_tau_critical(live, c, tau)) return c;
  }
  return u.root();
}

int isolation(const VertexTrie& live, const Tau& tau, Vertex v) {
  require_live(live, v);
  const Universe& u = live.universe();
  int iso = 0;
  for (int depth = 0; depth <= u.d(); ++depth)
    if (is_tau_critical(live, u.ancestor(v, depth), tau)) iso += u.d() - depth;
  return iso;
}

int crit_count(const VertexTrie& live, const Tau& tau, Vertex v) {
  require_live(live, v);
  const Universe& u = live.universe();
  int cnt = 0;
  for (int depth = 0; depth <= u.d(); ++depth)
    if (is_tau_critical(live, u.ancestor(v, depth), tau)) ++cnt;
  return cnt;
}

int cluster_isolation(const VertexTrie& live, const Tau& tau, Cluster c) {
  if (live.empty(c)) throw EmptyClusterError("isolation of empty cluster");
  int best = std::numeric_limits<int>::max();
  live.for_each(c, [&](Vertex v) { best = std::min(best, isolation(live, tau, v)); });
  return best;
}

int max_isolation(int d) { return d * (d + 1) / 2; }

bool is_degenerate(const VertexTrie& live, Cluster c) {
  const Universe& u = live.universe();
  if (c.depth == u.d()) return false;
  int nonempty = 0;
  for (int i = 0; i < u.k(); ++i)
    if (!live.empty(u.child(c, i))) ++nonempty;
  return nonempty == 1;
}

Cluster representative(const VertexTrie& live, Cluster c) {
  const Universe& u = live.universe();
  if (live.empty(c)) throw EmptyClusterError("representative of empty cluster");
  while (is_degenerate(live, c)) {
    for (int i = 0; i < u.k(); ++i) {
      Cluster ch = u.child(c, i);
      if (!live.empty(ch)) {
        c = ch;
        break;
      }
    }
  }
  return c;
}

std::string violation_json(const Universe& u, const Violation& v) {
  nlohmann::ordered_json j;
  j["cluster"] = u.label(v.cluster);
  if (v.kind == ViolationKind::MultipleCriticalChildren) {
    j["kind"] = "MultipleCriticalChildren";
    j["critical_children"] = v.count;
  } else {
    j["kind"] = "LowAverageDegree";
    j["critical_child"] = v.critical_child + 1;
    j["edges"] = v.edges;
    j["kprime"] = v.kprime;
    j["size"] = v.size;
  }
  return j.dump();
}

}  // namespace shc
