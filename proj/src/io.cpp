#include "shc/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace shc {

namespace {

struct Lines {
  std::istream& in;
  int number = 0;

  // Next non-empty, non-comment line split on whitespace.
  bool next(std::vector<std::string>& tok) {
    std::string line;
    while (std::getline(in, line)) {
      ++number;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      tok.clear();
      for (std::string t; ss >> t;) tok.push_back(t);
      if (!tok.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(number) + ": " + what);
  }

  std::uint64_t integer(const std::string& s) const {
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + s + "'");
    }
    if (pos != s.size() || s[0] == '-') fail("expected an integer, got '" + s + "'");
    return v;
  }

  Vertex vertex(const Universe& u, const std::string& s) const {
    try {
      return u.parse_vertex(s);
    } catch (const FormatError& e) {
      fail(e.what());
    }
  }
};

std::pair<int, int> header(Lines& lines, const std::string& word) {
  std::vector<std::string> tok;
  if (!lines.next(tok)) throw FormatError("empty file, expected '" + word + " k d'");
  if (tok.size() != 3 || tok[0] != word) lines.fail("expected '" + word + " k d'");
  return {static_cast<int>(lines.integer(tok[1])), static_cast<int>(lines.integer(tok[2]))};
}

}  // namespace

SemiHypercube read_graph(std::istream& in, std::uint64_t size_guard) {
  Lines lines{in};
  auto [k, d] = header(lines, "shc");
  SemiHypercube g{Universe(k, d, size_guard)};
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() != 2) lines.fail("expected 'u v'");
    Vertex a = lines.vertex(g.universe(), tok[0]);
    Vertex b = lines.vertex(g.universe(), tok[1]);
    try {
      g.set_partner(a, b);
    } catch (const FormatError& e) {
      lines.fail(e.what());
    }
  }
  g.check_matchings();
  return g;
}

void write_graph(std::ostream& out, const SemiHypercube& g) {
  const Universe& u = g.universe();
  out << "shc " << g.k() << ' ' << g.d() << '\n';
  for (auto [a, b] : g.edges()) out << u.label(a) << ' ' << u.label(b) << '\n';
}

RemovedSet read_removed(std::istream& in, const Universe& u) {
  Lines lines{in};
  RemovedSet r;
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() == 1) {
      r.vertices.push_back(lines.vertex(u, tok[0]));
    } else if (tok.size() == 2) {
      r.edges.push_back(edge_key(lines.vertex(u, tok[0]), lines.vertex(u, tok[1])));
    } else {
      lines.fail("expected a vertex or an edge");
    }
  }
  return r;
}

void write_removed(std::ostream& out, const Universe& u, const RemovedSet& r) {
  for (Vertex v : r.vertices) out << u.label(v) << '\n';
  for (std::uint64_t e : r.edges) out << u.label(edge_lo(e)) << ' ' << u.label(edge_hi(e)) << '\n';
}

std::vector<std::pair<Vertex, Vertex>> read_pairs(std::istream& in, const Universe& u) {
  Lines lines{in};
  std::vector<std::pair<Vertex, Vertex>> out;
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() != 2) lines.fail("expected 's t'");
    out.emplace_back(lines.vertex(u, tok[0]), lines.vertex(u, tok[1]));
  }
  return out;
}

std::vector<DemandPair> read_demand(std::istream& in, const Universe& u) {
  Lines lines{in};
  std::vector<DemandPair> out;
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() != 3) lines.fail("expected 'u v id'");
    out.push_back({lines.vertex(u, tok[0]), lines.vertex(u, tok[1]), lines.integer(tok[2])});
  }
  return out;
}

void write_demand(std::ostream& out, const Universe& u, const std::vector<DemandPair>& d) {
  for (const DemandPair& p : d) out << u.label(p.a) << ' ' << u.label(p.b) << ' ' << p.id << '\n';
}

std::vector<ScriptStep> read_script(std::istream& in, const Universe& u) {
  Lines lines{in};
  std::vector<ScriptStep> out;
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    ScriptStep step;
    std::size_t i = 0;
    while (i < tok.size()) {
      std::size_t j = i;
      while (j < tok.size() && tok[j] != ";") ++j;
      std::vector<std::string> op(tok.begin() + static_cast<std::ptrdiff_t>(i), tok.begin() + static_cast<std::ptrdiff_t>(j));
      i = j + 1;
      if (op.empty()) continue;
      ScriptOp s;
      const std::string& w = op[0];
      auto need = [&](std::size_t n) {
        if (op.size() != n + 1) lines.fail("'" + w + "' takes " + std::to_string(n) + " arguments");
      };
      if (w == "delv" || w == "addv") {
        need(1);
        s.kind = w == "delv" ? ScriptOp::Kind::DelVertex : ScriptOp::Kind::AddVertex;
        s.a = lines.vertex(u, op[1]);
      } else if (w == "dele" || w == "adde") {
        need(2);
        s.kind = w == "dele" ? ScriptOp::Kind::DelEdge : ScriptOp::Kind::AddEdge;
        s.a = lines.vertex(u, op[1]);
        s.b = lines.vertex(u, op[2]);
      } else if (w == "dadd") {
        need(3);
        s.kind = ScriptOp::Kind::AddDemand;
        s.a = lines.vertex(u, op[1]);
        s.b = lines.vertex(u, op[2]);
        s.id = lines.integer(op[3]);
      } else if (w == "drem") {
        need(1);
        s.kind = ScriptOp::Kind::RemDemand;
        s.id = lines.integer(op[1]);
      } else {
        lines.fail("unknown op '" + w + "'");
      }
      step.push_back(s);
    }
    if (!step.empty()) out.push_back(std::move(step));
  }
  return out;
}

std::vector<std::pair<Vertex, Vertex>> read_host_script(std::istream& in) {
  Lines lines{in};
  std::vector<std::pair<Vertex, Vertex>> out;
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() != 3 || tok[0] != "dele") lines.fail("expected 'dele u v'");
    out.emplace_back(static_cast<Vertex>(lines.integer(tok[1])), static_cast<Vertex>(lines.integer(tok[2])));
  }
  return out;
}

std::string format_op(const Universe& u, const ScriptOp& op) {
  switch (op.kind) {
    case ScriptOp::Kind::DelVertex: return "delv " + u.label(op.a);
    case ScriptOp::Kind::AddVertex: return "addv " + u.label(op.a);
    case ScriptOp::Kind::DelEdge: return "dele " + u.label(op.a) + " " + u.label(op.b);
    case ScriptOp::Kind::AddEdge: return "adde " + u.label(op.a) + " " + u.label(op.b);
    case ScriptOp::Kind::AddDemand: return "dadd " + u.label(op.a) + " " + u.label(op.b) + " " + std::to_string(op.id);
    case ScriptOp::Kind::RemDemand: return "drem " + std::to_string(op.id);
  }
  return {};
}

void write_script(std::ostream& out, const Universe& u, const std::vector<ScriptStep>& s) {
  for (const ScriptStep& step : s) {
    for (std::size_t i = 0; i < step.size(); ++i) out << (i ? " ; " : "") << format_op(u, step[i]);
    out << '\n';
  }
}

HostGraph read_host(std::istream& in) {
  Lines lines{in};
  std::vector<std::string> tok;
  if (!lines.next(tok)) throw FormatError("empty file, expected 'host n'");
  if (tok.size() != 2 || tok[0] != "host") lines.fail("expected 'host n'");
  HostGraph h;
  h.n = static_cast<std::uint32_t>(lines.integer(tok[1]));
  while (lines.next(tok)) {
    if (tok.size() != 2) lines.fail("expected 'u v'");
    auto a = lines.integer(tok[0]);
    auto b = lines.integer(tok[1]);
    if (a >= h.n || b >= h.n || a == b) lines.fail("host edge endpoint out of range");
    if (!h.edges.insert(edge_key(static_cast<Vertex>(a), static_cast<Vertex>(b))).second) lines.fail("duplicate host edge");
  }
  return h;
}

void write_host(std::ostream& out, const HostGraph& h) {
  out << "host " << h.n << '\n';
  std::vector<std::uint64_t> keys(h.edges.begin(), h.edges.end());
  std::sort(keys.begin(), keys.end());
  for (std::uint64_t e : keys) out << edge_lo(e) << ' ' << edge_hi(e) << '\n';
}

Embedding read_embedding(std::istream& in, HostGraph host, std::uint64_t size_guard) {
  Lines lines{in};
  auto [k, d] = header(lines, "embed");
  Embedding e;
  e.h = SemiHypercube{Universe(k, d, size_guard)};
  e.host = std::move(host);
  e.host_of.assign(e.h.n(), kNoVertex);
  const Universe& u = e.h.universe();
  std::vector<std::string> tok;
  while (lines.next(tok)) {
    if (tok.size() < 5 || tok[2] != ":") lines.fail("expected \"u' v' : v0 ... vm\"");
    Vertex a = lines.vertex(u, tok[0]);
    Vertex b = lines.vertex(u, tok[1]);
    try {
      e.h.set_partner(a, b);
    } catch (const FormatError& err) {
      lines.fail(err.what());
    }
    Path p;
    for (std::size_t i = 3; i < tok.size(); ++i) p.push_back(static_cast<Vertex>(lines.integer(tok[i])));
    for (auto [x, hv] : {std::pair{a, p.front()}, std::pair{b, p.back()}}) {
      if (e.host_of[x] != kNoVertex && e.host_of[x] != hv)
        lines.fail("H vertex " + u.label(x) + " placed on two host vertices");
      e.host_of[x] = hv;
    }
    if (a > b) std::reverse(p.begin(), p.end());
    e.paths[edge_key(a, b)] = std::move(p);
  }
  e.h.check_matchings();
  for (Vertex x = 0; x < e.h.n(); ++x)
    if (e.host_of[x] == kNoVertex) throw FormatError("H vertex " + u.label(x) + " has no host vertex");
  check_embedding(e);
  return e;
}

void write_embedding(std::ostream& out, const Embedding& e) {
  const Universe& u = e.h.universe();
  out << "embed " << e.h.k() << ' ' << e.h.d() << '\n';
  for (const auto& [key, p] : e.paths) {
    out << u.label(edge_lo(key)) << ' ' << u.label(edge_hi(key)) << " :";
    for (Vertex v : p) out << ' ' << v;
    out << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace shc
