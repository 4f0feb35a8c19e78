#include "shc/core.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

namespace shc {

Universe::Universe(int k, int d, std::uint64_t size_guard) : k_(k), d_(d) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  std::uint64_t p = 1;
  pow_.push_back(1);
  for (int e = 1; e <= d; ++e) {
    p *= static_cast<std::uint64_t>(k);
    if (p > size_guard || p > 0xffffffffULL)
      throw CapacityError("k^d = " + std::to_string(k) + "^" + std::to_string(d) +
                          " exceeds size guard " + std::to_string(size_guard));
    pow_.push_back(static_cast<std::uint32_t>(p));
  }
  n_ = pow_.back();
  std::uint64_t off = 0;
  for (int e = 0; e <= d; ++e) {
    offset_.push_back(static_cast<std::uint32_t>(off));
    off += pow_[e];
  }
  offset_.push_back(static_cast<std::uint32_t>(off));
}

int Universe::lcp_depth(Vertex u, Vertex v) const {
  int depth = 0;
  while (depth < d_ && digit(u, depth) == digit(v, depth)) ++depth;
  return depth;
}

std::string Universe::label(Vertex v) const { return label(leaf(v)); }

std::string Universe::label(Cluster c) const {
  std::string out;
  for (int j = 0; j < c.depth; ++j) {
    if (j) out.push_back('.');
    int dig = static_cast<int>((c.prefix / pow_[c.depth - 1 - j]) % k_);
    out += std::to_string(dig + 1);
  }
  return out;
}

Cluster Universe::parse_cluster(std::string_view s) const {
  Cluster c;
  if (s.empty()) return c;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t dot = s.find('.', pos);
    if (dot == std::string_view::npos) dot = s.size();
    std::string_view part = s.substr(pos, dot - pos);
    int dig = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), dig);
    if (ec != std::errc() || ptr != part.data() + part.size() || dig < 1 || dig > k_)
      throw FormatError("bad label '" + std::string(s) + "'");
    if (c.depth >= d_) throw FormatError("label too long '" + std::string(s) + "'");
    c = child(c, dig - 1);
    pos = dot + 1;
  }
  return c;
}

Vertex Universe::parse_vertex(std::string_view s) const {
  Cluster c = parse_cluster(s);
  if (c.depth != d_) throw FormatError("label must have " + std::to_string(d_) + " digits: '" + std::string(s) + "'");
  return c.prefix;
}

SemiHypercube::SemiHypercube(Universe u)
    : u_(std::move(u)),
      stride_(static_cast<std::size_t>(u_.k()) * static_cast<std::size_t>(u_.d())),
      nbr_(static_cast<std::size_t>(u_.n()) * stride_, kNoVertex) {}

void SemiHypercube::set_partner(Vertex u, Vertex v) {
  if (u >= n() || v >= n() || u == v) throw FormatError("edge endpoint out of range");
  int depth = u_.lcp_depth(u, v);
  int du = u_.digit(u, depth);
  int dv = u_.digit(v, depth);
  Vertex& su = nbr_[static_cast<std::size_t>(u) * stride_ + static_cast<std::size_t>(dv + u_.k() * depth)];
  Vertex& sv = nbr_[static_cast<std::size_t>(v) * stride_ + static_cast<std::size_t>(du + u_.k() * depth)];
  if (su != kNoVertex || sv != kNoVertex)
    throw FormatError("edge " + u_.label(u) + " " + u_.label(v) + " breaks a matching");
  su = v;
  sv = u;
}

bool SemiHypercube::adjacent(Vertex u, Vertex v) const {
  if (u == v) return false;
  int depth = u_.lcp_depth(u, v);
  return partner(u, depth, u_.digit(v, depth)) == v;
}

std::vector<std::uint32_t> SemiHypercube::matching(Cluster c, int i, int j) const {
  std::uint32_t m = u_.full_size(c) / static_cast<std::uint32_t>(u_.k());
  Vertex base_i = u_.first_vertex(u_.child(c, i));
  Vertex base_j = u_.first_vertex(u_.child(c, j));
  std::vector<std::uint32_t> perm(m);
  for (std::uint32_t q = 0; q < m; ++q) perm[q] = partner(base_i + q, c.depth, j) - base_j;
  return perm;
}

std::vector<std::pair<Vertex, Vertex>> SemiHypercube::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex v = 0; v < n(); ++v)
    for (int depth = 0; depth < d(); ++depth)
      for (int i = 0; i < k(); ++i) {
        Vertex w = partner(v, depth, i);
        if (w != kNoVertex && v < w) out.emplace_back(v, w);
      }
  return out;
}

void SemiHypercube::check_matchings() const {
  for (Vertex v = 0; v < n(); ++v)
    for (int depth = 0; depth < d(); ++depth)
      for (int i = 0; i < k(); ++i) {
        Vertex w = partner(v, depth, i);
        bool own = u_.digit(v, depth) == i;
        if (own) {
          if (w != kNoVertex) throw FormatError("self-cluster slot filled at " + u_.label(v));
          continue;
        }
        if (w == kNoVertex)
          throw FormatError("vertex " + u_.label(v) + " unmatched at depth " + std::to_string(depth) +
                            " toward sibling " + std::to_string(i + 1));
        if (u_.lcp_depth(v, w) != depth || u_.digit(w, depth) != i ||
            partner(w, depth, u_.digit(v, depth)) != v)
          throw FormatError("inconsistent matching at " + u_.label(v));
      }
}

SemiHypercube build_random_shc(int k, int d, std::uint64_t seed, std::uint64_t size_guard) {
  SemiHypercube g{Universe(k, d, size_guard)};
  const Universe& u = g.universe();
  Rng rng(seed);
  std::vector<std::uint32_t> perm;
  for (int depth = 0; depth < d; ++depth) {
    std::uint32_t m = u.pow(d - depth - 1);
    perm.resize(m);
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          std::iota(perm.begin(), perm.end(), 0u);
          rng.shuffle(perm.begin(), perm.end());
          Vertex bi = u.first_vertex(u.child(c, i));
          Vertex bj = u.first_vertex(u.child(c, j));
          for (std::uint32_t q = 0; q < m; ++q) g.set_partner(bi + q, bj + perm[q]);
        }
    }
  }
  return g;
}

SemiHypercube build_hypercube_style(int k, int d, std::uint64_t size_guard) {
  SemiHypercube g{Universe(k, d, size_guard)};
  const Universe& u = g.universe();
  for (int depth = 0; depth < d; ++depth) {
    std::uint32_t m = u.pow(d - depth - 1);
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) {
      Cluster c{depth, p};
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          Vertex bi = u.first_vertex(u.child(c, i));
          Vertex bj = u.first_vertex(u.child(c, j));
          for (std::uint32_t q = 0; q < m; ++q) g.set_partner(bi + q, bj + q);
        }
    }
  }
  return g;
}

VertexTrie::VertexTrie(const Universe& u, bool full)
    : u_(u), size_(u.cluster_count(), 0), alive_(u.n(), full ? 1 : 0) {
  if (!full) return;
  for (int depth = 0; depth <= u.d(); ++depth)
    for (std::uint32_t p = 0; p < u.clusters_at(depth); ++p) size_[u.flat({depth, p})] = u.full_size({depth, p});
}

void VertexTrie::remove(Vertex v) {
  if (!contains(v)) throw NotPresentError("vertex not present: " + u_.label(v));
  alive_[v] = 0;
  for (int depth = 0; depth <= u_.d(); ++depth) --size_[u_.flat(u_.ancestor(v, depth))];
}

void VertexTrie::insert(Vertex v) {
  if (v >= alive_.size()) throw NotPresentError("vertex out of range");
  if (alive_[v]) return;
  alive_[v] = 1;
  for (int depth = 0; depth <= u_.d(); ++depth) ++size_[u_.flat(u_.ancestor(v, depth))];
}

Vertex VertexTrie::sample(Cluster c, Rng& rng) const {
  std::uint32_t s = size(c);
  if (s == 0) throw EmptyClusterError("sample from empty cluster '" + u_.label(c) + "'");
  std::uint64_t r = rng.below(s);
  while (c.depth < u_.d()) {
    for (int i = 0; i < u_.k(); ++i) {
      Cluster ch = u_.child(c, i);
      std::uint32_t cs = size(ch);
      if (r < cs) {
        c = ch;
        break;
      }
      r -= cs;
    }
  }
  return c.prefix;
}

std::vector<Vertex> VertexTrie::members(Cluster c) const {
  std::vector<Vertex> out;
  out.reserve(size(c));
  for_each(c, [&](Vertex v) { out.push_back(v); });
  return out;
}

std::optional<Vertex> edge_to_sibling(const SemiHypercube& g, const VertexTrie& live, Vertex v,
                                      int depth, int sibling) {
  if (!live.contains(v)) throw NotPresentError("vertex not present: " + g.universe().label(v));
  if (depth < 0 || depth >= g.d() || sibling < 0 || sibling >= g.k() ||
      sibling == g.universe().digit(v, depth))
    throw std::invalid_argument("bad sibling query");
  Vertex w = g.partner(v, depth, sibling);
  if (!live.contains(w)) return std::nullopt;
  return w;
}

int cluster_degree(const SemiHypercube& g, const VertexTrie& live, Vertex v, int depth) {
  int own = g.universe().digit(v, depth);
  int deg = 0;
  for (int i = 0; i < g.k(); ++i)
    if (i != own && live.contains(g.partner(v, depth, i))) ++deg;
  return deg;
}

}  // namespace shc
