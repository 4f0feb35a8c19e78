#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shc/core.hpp"
#include "shc/embed.hpp"
#include "shc/harness.hpp"
#include "shc/io.hpp"
#include "shc/lowerbound.hpp"
#include "shc/validate.hpp"

using namespace shc;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string mode = "strict";
  std::string out;
};

// Exit codes: 0 ok, 1 invariant failure, 2 bad input.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Globals& g, const std::string& text, const std::string& path = {}) {
  const std::string& p = path.empty() ? g.out : path;
  if (p.empty() || p == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot write '" + p + "'");
  f << text;
}

std::istringstream open(const std::string& path) { return std::istringstream(read_file(path)); }

SemiHypercube load_graph(const std::string& path) {
  auto in = open(path);
  return read_graph(in);
}

Tau tau_or_strict(const std::string& text, int d, Mode mode) {
  Tau t = text.empty() ? Tau::strict(d) : parse_tau(text);
  t.strict_mode = mode == Mode::Strict;
  t.check(d);
  return t;
}

VertexTrie live_without(const Universe& u, const RemovedSet& r) {
  VertexTrie live(u);
  for (Vertex v : r.vertices)
    if (live.contains(v)) live.remove(v);
  return live;
}

RemovedSet load_removed(const std::string& path, const Universe& u) {
  if (path.empty()) return {};
  auto in = open(path);
  return read_removed(in, u);
}

std::string repro_text(const Universe& u, const std::vector<Vertex>& vs) {
  std::string s;
  for (Vertex v : vs) s += "delv " + u.label(v) + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-hypercube pruning and routing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--mode", g.mode, "strict or experimental")->check(CLI::IsMember({"strict", "experimental"}));
  app.add_option("--out", g.out, "Output file (stdout when omitted)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->require_subcommand(1);
  int k = 4, d = 2, d0 = 4;
  std::uint32_t extra = 0;
  std::string tau_text;
  auto* gen_random = gen->add_subcommand("random", "Random perfect matchings");
  auto* gen_cube = gen->add_subcommand("hypercube", "Identity matchings");
  auto* gen_hard = gen->add_subcommand("hard", "Hard family for the congestion lower bound");
  auto* gen_embed = gen->add_subcommand("embed", "Random graph embedded with subdivided edges");
  for (auto* s : {gen_random, gen_cube, gen_hard, gen_embed}) {
    s->add_option("--k", k)->required();
    s->add_option("--d", d)->required();
  }
  gen_hard->add_option("--d0", d0, "Starting depth");
  gen_hard->add_option("--tau", tau_text, "Defaults to 1/k");
  gen_embed->add_option("--extra", extra, "Number of subdivided edges");

  // validate
  auto* val = app.add_subcommand("validate", "Check the (k,d,tau) conditions");
  std::string graph_path, removed_path;
  val->add_option("--graph", graph_path)->required();
  val->add_option("--removed", removed_path);
  val->add_option("--tau", tau_text)->required();

  // route sample
  auto* route = app.add_subcommand("route", "Oblivious routing");
  route->require_subcommand(1);
  auto* sample = route->add_subcommand("sample", "Sample one path per pair");
  std::string pairs_path;
  sample->add_option("--graph", graph_path)->required();
  sample->add_option("--removed", removed_path);
  sample->add_option("--pairs", pairs_path)->required();
  sample->add_option("--tau", tau_text);

  // prune run
  auto* prune = app.add_subcommand("prune", "Self-pruning");
  prune->require_subcommand(1);
  auto* prune_run = prune->add_subcommand("run", "Run an adversary against the pruner");
  std::vector<std::string> adversary{"random"};
  std::optional<std::uint64_t> budget, rho;
  prune_run->add_option("--graph", graph_path)->required();
  prune_run->add_option("--adversary", adversary, "random | largest-nontarget | script FILE")->expected(1, 2);
  prune_run->add_option("--tau", tau_text);
  prune_run->add_option("--budget", budget, "Maximum deletions");
  prune_run->add_option("--rho", rho, "Trim multiplier (experimental mode)");

  // dynroute sim
  auto* dyn = app.add_subcommand("dynroute", "Deterministic dynamic routing");
  dyn->require_subcommand(1);
  auto* sim = dyn->add_subcommand("sim", "Replay an update script");
  std::string demand_path, script_path;
  std::optional<std::uint64_t> load;
  sim->add_option("--graph", graph_path)->required();
  sim->add_option("--removed", removed_path);
  sim->add_option("--demand", demand_path)->required();
  sim->add_option("--script", script_path)->required();
  sim->add_option("--tau", tau_text, "Defaults to 1/4");
  sim->add_option("--L", load, "Load bound; defaults to the demand's peak load");

  // embed prune
  auto* emb = app.add_subcommand("embed", "Pruning through an embedding");
  emb->require_subcommand(1);
  auto* emb_prune = emb->add_subcommand("prune", "Replay host edge deletions");
  std::string host_path, embedding_path;
  emb_prune->add_option("--host", host_path)->required();
  emb_prune->add_option("--embedding", embedding_path)->required();
  emb_prune->add_option("--script", script_path)->required();
  emb_prune->add_option("--tau", tau_text);
  emb_prune->add_option("--rho", rho, "Trim multiplier (experimental mode)");

  // params suggest
  auto* params = app.add_subcommand("params", "Parameter helper");
  params->require_subcommand(1);
  auto* suggest = params->add_subcommand("suggest", "Pick k, tau and rho for a target size");
  std::uint64_t n_target = 0;
  suggest->add_option("--n", n_target)->required();
  suggest->add_option("--d", d)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    Mode mode = parse_mode(g.mode);
    if (gen_random->parsed() || gen_cube->parsed()) {
      SemiHypercube h = gen_random->parsed() ? build_random_shc(k, d, g.seed) : build_hypercube_style(k, d);
      std::ostringstream s;
      write_graph(s, h);
      emit(g, s.str());
      return 0;
    }
    if (gen_hard->parsed()) {
      Tau t = tau_text.empty() ? Tau::of(1, static_cast<std::uint64_t>(k)) : parse_tau(tau_text);
      HardInstance h = build_hard_instance(k, d, d0, t);
      const Universe& u = h.g.universe();
      RemovedSet r;
      for (Vertex v = 0; v < u.n(); ++v)
        if (!h.live.contains(v)) r.vertices.push_back(v);
      r.edges.assign(h.removed.begin(), h.removed.end());
      std::sort(r.edges.begin(), r.edges.end());
      HardDemand dem = hard_demand(h);
      bool valid = validate(h.g, h.live, t, &h.removed).valid;
      nlohmann::ordered_json j;
      j["k"] = k;
      j["d"] = d;
      j["d0"] = d0;
      j["tau"] = to_string(t);
      j["hard"] = h.hard.size();
      j["s_closed_form"] = h.spec.hard_size(d);
      j["cut"] = measured_cut(h);
      j["c_closed_form"] = h.spec.cut_size(d);
      j["crossing_demand"] = dem.crossing;
      j["cut_ratio"] = Fraction{dem.crossing, dem.cut == 0 ? 1 : dem.cut}.str();
      j["valid"] = valid;
      if (g.out.empty()) {
        std::ostringstream s;
        write_graph(s, h.g);
        std::cout << s.str();
      } else {
        std::ostringstream gs, rs, ds;
        write_graph(gs, h.g);
        write_removed(rs, u, r);
        write_demand(ds, u, dem.pairs);
        emit(g, gs.str());
        emit(g, rs.str(), g.out + ".removed");
        emit(g, ds.str(), g.out + ".demand");
        std::cout << j.dump() << '\n';
      }
      if (mode == Mode::Strict && !valid) throw Failure("hard instance fails validate");
      return 0;
    }
    if (gen_embed->parsed()) {
      Embedding e = subdivided_embedding(build_random_shc(k, d, g.seed), extra, g.seed);
      std::ostringstream hs, es;
      write_host(hs, e.host);
      write_embedding(es, e);
      if (g.out.empty()) {
        std::cout << hs.str() << es.str();
      } else {
        emit(g, es.str());
        emit(g, hs.str(), g.out + ".host");
      }
      return 0;
    }
    if (val->parsed()) {
      SemiHypercube h = load_graph(graph_path);
      RemovedSet r = load_removed(removed_path, h.universe());
      VertexTrie live = live_without(h.universe(), r);
      EdgeSet removed(r.edges.begin(), r.edges.end());
      Tau t = parse_tau(tau_text);
      ValidityReport rep = validate(h, live, t, &removed);
      std::ostringstream s;
      for (const Violation& v : rep.violations) s << violation_json(h.universe(), v) << '\n';
      nlohmann::ordered_json j;
      j["valid"] = rep.valid;
      j["violations"] = rep.violations.size();
      j["remaining"] = live.size();
      s << j.dump() << '\n';
      emit(g, s.str());
      if (mode == Mode::Strict && !rep.valid) throw Failure("graph is not a valid semi-hypercube at tau " + to_string(t));
      return 0;
    }
    if (sample->parsed()) {
      SemiHypercube h = load_graph(graph_path);
      const Universe& u = h.universe();
      RemovedSet r = load_removed(removed_path, u);
      if (!r.edges.empty()) throw FormatError("route sample takes vertex removals only");
      VertexTrie live = live_without(u, r);
      Tau t = tau_or_strict(tau_text, h.d(), Mode::Experimental);
      auto pin = open(pairs_path);
      auto pairs = read_pairs(pin, u);
      SampleReport rep = sample_routes(h, live, {}, t, pairs, g.seed);
      std::ostringstream s, c;
      write_sample_csv(s, u, rep);
      write_congestion_csv(c, u, rep.congestion);
      emit(g, s.str());
      if (!g.out.empty()) emit(g, c.str(), g.out + ".congestion.csv");
      for (const SampleRow& row : rep.rows)
        if (!row.valid) throw Failure("sampled path " + u.label(row.src) + " -> " + u.label(row.dst) + " is invalid");
      return 0;
    }
    if (prune_run->parsed()) {
      SemiHypercube h = load_graph(graph_path);
      const Universe& u = h.universe();
      PruneConfig cfg;
      cfg.graph = &h;
      cfg.tau = tau_or_strict(tau_text, h.d(), mode);
      cfg.pruner.mode = mode;
      if (rho) {
        if (mode == Mode::Strict) throw std::invalid_argument("--rho needs --mode experimental");
        cfg.pruner.rho = rho;
      }
      cfg.adversary = parse_adversary(adversary.at(0));
      if (cfg.adversary == AdversaryKind::RandomEdge) throw std::invalid_argument("prune run deletes vertices");
      if (cfg.adversary == AdversaryKind::Scripted) {
        if (adversary.size() != 2) throw std::invalid_argument("--adversary script needs a FILE");
        auto in = open(adversary[1]);
        for (const ScriptStep& st : read_script(in, u))
          for (const ScriptOp& op : st) {
            if (op.kind != ScriptOp::Kind::DelVertex) throw FormatError("prune scripts hold delv ops only");
            cfg.script.push_back(op.a);
          }
      }
      cfg.seed = g.seed;
      cfg.budget = budget;
      PruneReport rep = run_prune_experiment(cfg);
      std::ostringstream s;
      write_prune_csv(s, u, rep.rows);
      emit(g, s.str());
      if (rep.failed) {
        std::cerr << "repro (" << rep.repro.size() << " deletions):\n" << repro_text(u, rep.repro);
        throw Failure(rep.failure);
      }
      return 0;
    }
    if (sim->parsed()) {
      SemiHypercube h = load_graph(graph_path);
      const Universe& u = h.universe();
      RoutingConfig cfg;
      cfg.graph = &h;
      cfg.removed = load_removed(removed_path, u);
      cfg.tau = tau_text.empty() ? Tau::of(1, 4) : parse_tau(tau_text);
      cfg.mode = mode;
      auto din = open(demand_path);
      cfg.demand = read_demand(din, u);
      auto sin = open(script_path);
      cfg.script = read_script(sin, u);
      if (load) {
        cfg.L = *load;
      } else {
        std::map<Vertex, std::uint64_t> at;
        cfg.L = 1;
        for (const DemandPair& p : cfg.demand) {
          cfg.L = std::max(cfg.L, ++at[p.a]);
          cfg.L = std::max(cfg.L, ++at[p.b]);
        }
      }
      RoutingReport rep = run_routing_experiment(cfg);
      std::ostringstream s;
      write_dynroute_csv(s, rep.rows);
      emit(g, s.str());
      if (rep.failed) {
        std::ostringstream r;
        write_script(r, u, rep.repro);
        std::cerr << "repro (" << rep.repro.size() << " updates):\n" << r.str();
        throw Failure(rep.failure);
      }
      return 0;
    }
    if (emb_prune->parsed()) {
      auto hin = open(host_path);
      HostGraph host = read_host(hin);
      auto ein = open(embedding_path);
      Embedding e = read_embedding(ein, std::move(host));
      EmbedOptions opt;
      opt.tau = tau_or_strict(tau_text, e.h.d(), mode);
      opt.pruner.mode = mode;
      if (rho) {
        if (mode == Mode::Strict) throw std::invalid_argument("--rho needs --mode experimental");
        opt.pruner.rho = rho;
      }
      auto sin = open(script_path);
      auto dels = read_host_script(sin);
      EmbedReport rep = run_embed_experiment(e, opt, dels);
      std::ostringstream s;
      write_embed_csv(s, rep.rows);
      emit(g, s.str());
      if (rep.failed) throw Failure(rep.failure);
      return 0;
    }
    if (suggest->parsed()) {
      ParamSuggestion p = suggest_parameters(n_target, d);
      nlohmann::ordered_json j;
      j["n"] = n_target;
      j["d"] = p.d;
      j["k"] = p.k;
      j["tau"] = to_string(p.tau);
      j["rho"] = p.rho;
      j["warnings"] = p.warnings;
      emit(g, j.dump() + "\n");
      return 0;
    }
  } catch (const Failure& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
