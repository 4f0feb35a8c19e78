#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shc/core.hpp"
#include "shc/dynroute.hpp"
#include "shc/embed.hpp"

namespace shc {

// Text formats. Blank lines and lines starting with '#' are ignored
// everywhere. Vertices of H are dot-separated labels; host vertices are
// plain integers.

// `shc k d`, then `u v` per edge.
SemiHypercube read_graph(std::istream& in, std::uint64_t size_guard = kDefaultSizeGuard);
void write_graph(std::ostream& out, const SemiHypercube& g);

// One label per line removes a vertex; two labels remove an edge.
struct RemovedSet {
  std::vector<Vertex> vertices;
  std::vector<std::uint64_t> edges;
};
RemovedSet read_removed(std::istream& in, const Universe& u);
void write_removed(std::ostream& out, const Universe& u, const RemovedSet& r);

// `s t` per line.
std::vector<std::pair<Vertex, Vertex>> read_pairs(std::istream& in, const Universe& u);

// `u v id` per line.
std::vector<DemandPair> read_demand(std::istream& in, const Universe& u);
void write_demand(std::ostream& out, const Universe& u, const std::vector<DemandPair>& d);

// One update per line, ops separated by ';':
//   delv V | addv V | dele U V | adde U V | dadd U V ID | drem ID
// For host scripts U and V are host integers and only `dele` is allowed.
struct ScriptOp {
  enum class Kind { DelVertex, AddVertex, DelEdge, AddEdge, AddDemand, RemDemand };
  Kind kind = Kind::DelVertex;
  Vertex a = kNoVertex;
  Vertex b = kNoVertex;
  std::uint64_t id = 0;
};
using ScriptStep = std::vector<ScriptOp>;
std::vector<ScriptStep> read_script(std::istream& in, const Universe& u);
std::vector<std::pair<Vertex, Vertex>> read_host_script(std::istream& in);
std::string format_op(const Universe& u, const ScriptOp& op);
void write_script(std::ostream& out, const Universe& u, const std::vector<ScriptStep>& s);

// `host n`, then `u v` per edge.
HostGraph read_host(std::istream& in);
void write_host(std::ostream& out, const HostGraph& h);

// `embed k d`, then `u' v' : v0 v1 ... vm` per H edge. The host must be
// loaded first; H's matchings come from the listed edges.
Embedding read_embedding(std::istream& in, HostGraph host, std::uint64_t size_guard = kDefaultSizeGuard);
void write_embedding(std::ostream& out, const Embedding& e);

// Opens or throws FormatError naming the path.
std::string read_file(const std::string& path);

}  // namespace shc
