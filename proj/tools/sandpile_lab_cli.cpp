#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sandpile_lab/experiments.hpp"
#include "sandpile_lab/errors.hpp"
#include "sandpile_lab/selftest.hpp"

using namespace sandpile_lab;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GraphArgs {
  std::string preset = "basilica";
  std::string ray;
  int level = -1;
  std::string ends = "one";
};

void add_graph_options(CLI::App* cmd, GraphArgs& a, bool level_required) {
  cmd->add_option("--preset", a.preset, "basilica | img3 | adding | kneading:<bits>");
  cmd->add_option("--ray", a.ray, "lit:<w> | per(<p>) | pre(<w>)per(<p>) | triple:l=..;m=..;t=.. | rand:<seed>");
  auto* lv = cmd->add_option("--level", a.level, "tree level n");
  if (level_required) lv->required();
  cmd->add_option("--ends", a.ends, "one | two | four")->check(CLI::IsMember({"one", "two", "four"}));
}

EndConvention convention(const std::string& s) {
  if (s == "two") return EndConvention::two_ended;
  if (s == "four") return EndConvention::four_ended;
  return EndConvention::one_ended;
}

Exhaustion build_exhaustion(const GraphArgs& a) {
  GroupPreset p = preset(a.preset);
  Ray ray = parse_ray(a.ray.empty() ? "per(0)" : a.ray, p.automaton.alphabet());
  return exhaustion_subgraph(p, a.level, ray.prefix(a.level), convention(a.ends));
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kind_name(Block::Kind k) {
  switch (k) {
    case Block::Kind::cycle: return "cycle";
    case Block::Kind::edge: return "edge";
    default: return "other-2-connected";
  }
}

json analyze(const Exhaustion& ex) {
  const SandpileGraph& g = ex.sandpile;
  const int sink = g.sinks().at(0);
  BlockDecomposition dec = block_decompose(g.graph, sink);
  json blocks = json::array();
  for (const auto& b : dec.blocks) blocks.push_back({{"kind", kind_name(b.kind)}, {"vertices", b.vertices}});
  json out;
  out["level"] = ex.level;
  out["ends"] = to_string(ex.convention);
  out["vertices"] = g.num_vertices();
  out["root"] = g.root;
  out["is_cactus"] = dec.is_cactus;
  out["blocks"] = blocks;
  out["cut_vertices"] = dec.cut_vertices;
  json cg = json::array();
  if (dec.is_cactus) {
    for (auto [order, mult] : critical_group(dec).factors) cg.push_back({order, mult});
    PathModel pm = path_model(g, g.root);
    out["block_path"] = pm.cp.sizes;
    out["entry_positions"] = pm.cp.entry_pos;
    out["d"] = pm.d;
    out["diam"] = pm.deco.diam;
    BetaStats bs = beta_stats(pm.deco);
    out["beta"] = bs.beta;
    out["beta_prime"] = bs.beta_prime;
  }
  out["critical_group"] = cg;
  GrowthStats all = growth_stats(g.graph, g.root, g.num_vertices());
  int r = 0;
  while (r + 1 < static_cast<int>(all.ball.size()) && all.ball[r + 1] * 16 <= g.num_vertices()) ++r;
  if (r >= 4) {
    GrowthStats gs = growth_stats(g.graph, g.root, r, std::max(1, r / 4));
    out["alpha_hat"] = gs.alpha_hat;
    out["growth_window"] = {gs.r_lo, gs.r_hi};
  } else {
    out["alpha_hat"] = nullptr;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sandpiles on Schreier graphs of self-similar groups"};
  app.set_version_flag("--version", std::string("sandpile-lab ") + kVersion + " presets=" +
                                         [] {
                                           char buf[32];
                                           std::snprintf(buf, sizeof buf, "%016llx",
                                                         static_cast<unsigned long long>(preset_registry_hash()));
                                           return std::string(buf);
                                         }());
  app.require_subcommand(1);
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--threads", threads, "worker threads for Monte Carlo sampling")->check(CLI::PositiveNumber);

  GraphArgs bg;
  std::string graph_out;
  auto* build = app.add_subcommand("build-graph", "write the graph JSON of a level or an exhaustion");
  add_graph_options(build, bg, true);
  bool full = false;
  build->add_flag("--full", full, "the whole Schreier graph instead of an exhaustion");
  build->add_option("--graph-out", graph_out, "output path (default stdout)");

  GraphArgs ag;
  std::string analyze_out;
  auto* an = app.add_subcommand("analyze", "block structure, decorations, critical group and growth");
  add_graph_options(an, ag, true);
  an->add_option("--out", analyze_out, "output path (default stdout)");

  GraphArgs dg;
  std::string method = "dp", dist_out;
  long long samples = 100000;
  std::uint64_t seed = 7;
  int cap = -1;
  auto* dist = app.add_subcommand("dist", "avalanche mass law at the root");
  add_graph_options(dist, dg, true);
  dist->add_option("--method", method)->check(CLI::IsMember({"exact", "dp", "mc"}));
  dist->add_option("--samples", samples)->check(CLI::NonNegativeNumber);
  dist->add_option("--seed", seed);
  dist->add_option("--cap-block", cap, "resolve blocks C_1..C_J (default: all)");
  dist->add_option("--out", dist_out, "CSV output path (default stdout)");
  dist->add_option("--threads", threads)->check(CLI::PositiveNumber);

  std::string fit_in;
  double fit_lo = -1, fit_hi = -1;
  auto* fit = app.add_subcommand("fit", "log-log exponent fit of a distribution CSV");
  fit->add_option("csv", fit_in)->required();
  fit->add_option("--m-lo", fit_lo);
  fit->add_option("--m-hi", fit_hi);

  ExperimentConfig ec;
  std::string exp_out;
  auto* exp = app.add_subcommand("experiment", "run a named experiment and report pass/fail");
  exp->add_option("name", ec.name)->required()->check(CLI::IsMember(experiment_names()));
  exp->add_option("--seed", ec.seed);
  exp->add_option("--level", ec.level);
  exp->add_option("--samples", ec.samples);
  exp->add_option("--cap-block", ec.cap_block);
  exp->add_option("--m-lo", ec.m_lo);
  exp->add_option("--m-hi", ec.m_hi);
  exp->add_option("--out", exp_out, "JSON output path (default stdout)");
  exp->add_option("--threads", threads)->check(CLI::PositiveNumber);

  auto* self = app.add_subcommand("selftest", "run the built-in oracle battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*build) {
      if (full) {
        SchreierGraph g = schreier_graph(preset(bg.preset), bg.level);
        emit(graph_json(g).dump(2) + "\n", graph_out);
      } else {
        Exhaustion ex = build_exhaustion(bg);
        emit(graph_json(ex.sandpile, bg.preset, ex.level).dump(2) + "\n", graph_out);
      }
    } else if (*an) {
      emit(analyze(build_exhaustion(ag)).dump(2) + "\n", analyze_out);
    } else if (*dist) {
      Exhaustion ex = build_exhaustion(dg);
      const SandpileGraph& g = ex.sandpile;
      MassDistribution d;
      if (method == "mc") {
        McOptions opt;
        opt.threads = threads;
        d = mc_distribution(g, g.root, samples, seed, opt);
      } else {
        PathModel pm = path_model(g, g.root);
        int J = cap > 0 ? std::min(cap, pm.r()) : pm.r();
        d = method == "dp" ? dp_blockpath_distribution(g, g.root, J) : exact_blockpath_distribution(g, g.root, J);
      }
      d.level = ex.level;
      emit(distribution_csv(d), dist_out);
    } else if (*fit) {
      MassDistribution d = distribution_from_csv(read_file(fit_in));
      ExponentFit f = fit_exponent(d, fit_lo, fit_hi);
      json j{{"delta_hat", f.delta_hat}, {"stderr", f.stderr_}, {"window", {f.m_lo, f.m_hi}}, {"method", f.method},
             {"points", f.points}};
      std::cout << j.dump(2) << "\n";
    } else if (*exp) {
      ec.threads = threads;
      ExperimentReport r = run_experiment(ec);
      emit(r.data.dump(2) + "\n", exp_out);
      return r.pass ? 0 : 2;
    } else if (*self) {
      return run_selftest(std::cout) ? 0 : 2;
    }
  } catch (const InvalidLevelError& e) {
    std::cerr << "error: " << e.what();
    if (e.nearest_valid >= 0) std::cerr << " (nearest valid level " << e.nearest_valid << ")";
    std::cerr << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
