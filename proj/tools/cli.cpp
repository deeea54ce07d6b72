#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "pebblemark/builders.hpp"
#include "pebblemark/dag.hpp"
#include "pebblemark/game.hpp"
#include "pebblemark/mhf.hpp"
#include "pebblemark/memory.hpp"
#include "pebblemark/pebbling.hpp"
#include "pebblemark/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pebblemark::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  return to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size())));
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Collects the run's artifacts so a manifest can reproduce and verify them.
struct RunContext {
  std::vector<std::string> argv;           // resolved argv (seeds made explicit)
  json report = json::object();
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string manifest_path;

  void note_input(const fs::path& p) { inputs[p.string()] = file_sha256(p); }
  void emit(const fs::path& p, const std::string& data) {
    write_file(p, data);
    outputs[p.string()] = file_sha256(p);
  }
};

json manifest_json(const RunContext& ctx) {
  json m;
  m["tool"] = "pebblemark";
  m["version"] = kVersion;
  m["argv"] = ctx.argv;
  m["inputs"] = ctx.inputs;
  m["outputs"] = ctx.outputs;
  m["report_sha256"] =
      to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(ctx.report.dump(2).data()),
                              ctx.report.dump(2).size())));
  return m;
}

Bytes parse_seed_flag(std::string& seed_hex, std::vector<std::string>& argv_out, std::ostream& err) {
  if (seed_hex.empty()) {
    if (const char* env = std::getenv("PEBBLEMARK_SEED"); env && *env) {
      seed_hex = env;
    } else {
      std::random_device rd;
      Bytes fresh(32);
      for (auto& b : fresh) b = static_cast<std::uint8_t>(rd());
      seed_hex = to_hex(fresh);
      err << "generated seed: " << seed_hex << "\n";
    }
  }
  // Make the seed explicit in the recorded argv so repro is exact.
  argv_out.push_back("--seed");
  argv_out.push_back(seed_hex);
  return from_hex(seed_hex);
}

struct LoadedGraph {
  std::optional<Dag> dag;
  std::shared_ptr<DynamicGraphSpec> spec;
  std::string hash;
};

LoadedGraph load_graph(RunContext& ctx, const std::string& path, const std::string& resolver) {
  LoadedGraph out;
  ctx.note_input(path);
  ParsedGraph parsed = parse_graph(read_file(path));
  if (parsed.dag) {
    out.dag = *parsed.dag;
    out.hash = graph_hash(*parsed.dag);
  } else {
    out.spec = std::make_shared<DynamicGraphSpec>(std::move(*parsed.spec));
    if (resolver == "keyed") {
      out.spec->set_resolver(ResolverKind::KeyedDistinct);
    } else if (resolver == "uniform" || resolver.empty()) {
      out.spec->set_resolver(ResolverKind::Uniform);
    } else {
      throw std::invalid_argument("unknown resolver '" + resolver + "'");
    }
    out.hash = graph_hash(*out.spec);
  }
  return out;
}

std::shared_ptr<DynamicGraphSpec> as_spec(LoadedGraph& g) {
  if (g.spec) return g.spec;
  // Wrap a static dag as a spec with an empty dynamic suffix.
  return std::make_shared<DynamicGraphSpec>(*g.dag, std::vector<std::vector<NodeId>>{}, 1,
                                            ResolverKind::Uniform);
}

json cost_report_json(const CostReport& r) {
  return json{{"cc", r.cc},
              {"rounds", r.rounds},
              {"light_cc", r.light_cc},
              {"balloon_cc", r.balloon_cc},
              {"repebble_cc", r.repebble_cc}};
}

json advantage_json(const AdvantageEstimate& est) {
  return json{{"wins", est.wins},
              {"trials", est.trials},
              {"win_rate", est.win_rate},
              {"advantage", est.advantage},
              {"ci_method", "wilson-95"},
              {"win_ci_low", est.win_ci.low},
              {"win_ci_high", est.win_ci.high},
              {"adv_ci_low", est.adv_ci_low},
              {"adv_ci_high", est.adv_ci_high},
              {"timeouts", est.timeouts}};
}

// --- graph ----------------------------------------------------------------

int cmd_graph_build(RunContext& ctx, const std::string& family, std::uint32_t n, double eps, std::uint32_t k,
                    const Bytes& seed, const std::string& flavor, const std::string& out_path) {
  std::string text;
  json extra;
  if (family == "line") {
    text = serialize(line_graph(n));
  } else if (family == "grates") {
    DepthRobustStack stack = depth_robust_stack(n, eps, seed);
    text = serialize(stack.graph.dag);
    extra = json{{"gamma", stack.profile.gamma},
                 {"c", stack.profile.c},
                 {"d_target", stack.profile.d_target},
                 {"epsilon", stack.profile.epsilon},
                 {"downgraded", stack.profile.downgraded}};
  } else if (family == "superconc") {
    ScFlavor f = flavor == "recursive" ? ScFlavor::Recursive : ScFlavor::Butterfly;
    text = serialize(superconcentrator(n, f).dag);
  } else if (family == "fig4") {
    SampledConstruction c = sample_fig4(n, eps, k, seed);
    text = serialize(c.spec);
    extra = json{{"alpha", c.alpha}, {"k", c.spec.k()}, {"blocks", c.layout.n_blocks}};
  } else if (family == "fig5") {
    SampledConstruction c = sample_fig5(n, eps, k, seed);
    text = serialize(c.spec);
    extra = json{{"alpha", c.alpha}, {"k", c.spec.k()}, {"blocks", c.layout.n_blocks}};
  } else {
    throw std::invalid_argument("unknown family '" + family + "'");
  }
  ctx.emit(out_path, text);
  ctx.report["command"] = "graph build";
  ctx.report["family"] = family;
  ctx.report["n"] = n;
  ctx.report["out"] = out_path;
  ctx.report["graph_sha256"] = ctx.outputs[out_path];
  if (!extra.is_null()) ctx.report["profile"] = extra;
  return 0;
}

int cmd_graph_verify(RunContext& ctx, const std::string& check, const std::string& path, double eps,
                     std::uint32_t samples, const Bytes& seed, const std::string& resolver) {
  LoadedGraph g = load_graph(ctx, path, resolver);
  ctx.report["command"] = "graph verify";
  ctx.report["check"] = check;
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = g.hash;
  bool pass = false;
  if (check == "amenable") {
    if (!g.spec) throw std::invalid_argument("amenable check needs a dynamic spec");
    AmenabilityReport rep = check_amenable(*g.spec);
    json clauses = json::array();
    for (const auto& c : rep.clauses) {
      clauses.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    ctx.report["clauses"] = clauses;
    pass = rep.pass;
  } else if (check == "superconc") {
    if (!g.dag) throw std::invalid_argument("superconcentrator check needs a static dag");
    // Interface sets are structural: sources are inputs, sinks are outputs.
    std::uint32_t n_in = 0;
    for (NodeId v = 1; v <= g.dag->size() && g.dag->parents(v).empty(); ++v) ++n_in;
    IoDag io{*g.dag, n_in, n_in};
    ScAuditResult audit = audit_superconcentrator(io, samples, seed);
    ctx.report["samples"] = audit.samples;
    ctx.report["failures"] = audit.failures;
    ctx.report["detail"] = audit.detail;
    pass = audit.pass;
  } else if (check == "depth-robust") {
    const Dag& dag = g.dag ? *g.dag : g.spec->base();
    std::uint32_t width = dag.size();
    DepthRobustProfile prof = audit_depth_robust(dag, width, eps);
    ctx.report["gamma"] = prof.gamma;
    ctx.report["c"] = prof.c;
    ctx.report["d_target"] = prof.d_target;
    ctx.report["downgraded"] = prof.downgraded;
    pass = !prof.downgraded;
  } else {
    throw std::invalid_argument("unknown check '" + check + "'");
  }
  ctx.report["pass"] = pass;
  return pass ? 0 : 1;
}

// --- pebble ----------------------------------------------------------------

int cmd_pebble_attack(RunContext& ctx, const std::string& path, std::uint32_t eta, std::uint64_t g,
                      const Bytes& seed, const std::string& resolver) {
  LoadedGraph lg = load_graph(ctx, path, resolver);
  auto spec = as_spec(lg);
  AttackParams params;
  params.eta = eta;
  params.g = g;
  AttackResult res = generic_attack(spec, params, seed);
  bool legal = check_legal(res.trace);
  std::uint64_t bound = attack_cost_bound(spec->total_nodes(), std::max(1u, spec->k()),
                                          spec->indeg_bound(), res.params.eta, res.params.g);
  ctx.report["command"] = "pebble attack";
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = lg.hash;
  ctx.report["eta"] = res.params.eta;
  ctx.report["g"] = res.params.g;
  ctx.report["legal"] = legal;
  ctx.report["fallbacks"] = res.fallbacks;
  ctx.report["cost"] = cost_report_json(res.report);
  ctx.report["cost_bound"] = bound;
  ctx.report["within_4x_bound"] = res.report.cc <= 4 * bound;
  return legal ? 0 : 1;
}

int cmd_pebble_valiant(RunContext& ctx, const std::string& path, std::uint32_t eta) {
  LoadedGraph lg = load_graph(ctx, path, "");
  if (!lg.dag) throw std::invalid_argument("pebble valiant needs a static dag");
  std::vector<NodeId> s = valiant_reduce(*lg.dag, eta);
  std::uint32_t dep = depth(remove(*lg.dag, s).dag);
  ctx.report["command"] = "pebble valiant";
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = lg.hash;
  ctx.report["eta"] = eta;
  ctx.report["set_size"] = s.size();
  ctx.report["e_bound"] = AttackParams::e_bound(lg.dag->size(), lg.dag->indeg_bound(), eta);
  ctx.report["depth_after"] = dep;
  ctx.report["d_bound"] = AttackParams::d_bound(lg.dag->size(), eta);
  ctx.report["set"] = s;
  return 0;
}

int cmd_pebble_suite(RunContext& ctx, const std::string& path, std::uint32_t trials, double delta,
                     const std::vector<std::string>& strategies, const Bytes& seed,
                     const std::string& resolver, std::uint32_t jobs) {
  LoadedGraph lg = load_graph(ctx, path, resolver);
  auto spec = as_spec(lg);
  auto reports = strategy_suite(spec, strategies, seed);
  json per_strategy = json::object();
  std::uint64_t best = UINT64_MAX;
  for (const auto& [name, rep] : reports) {
    per_strategy[name] = cost_report_json(rep);
    best = std::min(best, rep.cc);
  }
  ctx.report["command"] = "pebble suite";
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = lg.hash;
  ctx.report["n"] = spec->total_nodes();
  ctx.report["strategies"] = per_strategy;
  ctx.report["min_cc"] = best;
  if (trials > 1) {
    DistributionReport dist = cc_distribution(spec, "generic-attack", trials, delta, seed, jobs);
    ctx.report["distribution"] = json{{"trials", dist.trials}, {"delta", dist.delta},
                                      {"quantile", dist.quantile}, {"min", dist.min},
                                      {"max", dist.max},         {"mean", dist.mean}};
  }
  return 0;
}

// --- mhf --------------------------------------------------------------------

int cmd_mhf_eval(RunContext& ctx, const std::string& path, const std::string& input_hex,
                 const std::string& coins_hex, std::uint64_t cache, const std::string& policy,
                 const std::string& trace_out, bool emit_output, const std::string& mode,
                 const std::string& resolver) {
  LoadedGraph lg = load_graph(ctx, path, resolver);
  if (!lg.spec) throw std::invalid_argument("mhf eval needs a dynamic spec");
  Bytes x = from_hex(input_hex);
  Bytes coins = from_hex(coins_hex);
  Oracle oracle(Bytes{}, 32);
  std::uint64_t capacity = cache ? cache : required_cache_capacity(*lg.spec);
  TieredMemory mem(capacity, policy_from_string(policy), oracle.width());
  EvalOptions options;
  if (mode == "hybrid") options.family = PermFamily::TrulyRandom;
  if (mode == "noshuffle") options.shuffle = false;
  EvalResult res = mhf_eval(*lg.spec, oracle, x, coins, mem, options);
  ctx.report["command"] = "mhf eval";
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = lg.hash;
  ctx.report["cache_capacity"] = capacity;
  ctx.report["policy"] = policy;
  ctx.report["mode"] = mode.empty() ? "full" : mode;
  ctx.report["events"] = res.leakage.events().size();
  if (emit_output) {
    ctx.report["output"] = to_hex(res.output);
    ctx.report["vector"] = "vector v1 " + lg.hash + " " + input_hex + " " + coins_hex + " " + to_hex(res.output);
  }
  if (!trace_out.empty()) {
    ctx.emit(trace_out, res.leakage.serialize());
    ctx.report["trace"] = trace_out;
  }
  return 0;
}

// --- game -------------------------------------------------------------------

int cmd_game_run(RunContext& ctx, const std::string& path, const std::string& attacker, std::uint32_t trials,
                 const std::string& mode, const std::string& evaluator, const Bytes& seed,
                 std::uint32_t jobs, const std::string& x0_hex, const std::string& x1_hex) {
  LoadedGraph lg = load_graph(ctx, path, "keyed");
  if (!lg.spec) throw std::invalid_argument("game run needs a dynamic spec");
  GameEnv env{lg.spec, Oracle(Bytes{}, 32), evaluator_mode_from_string(evaluator), 0, EvictionPolicy::Lru};
  GameConfig config;
  config.trials = trials;
  config.seed = seed;
  config.jobs = jobs;
  AdvantageEstimate est;
  std::string mode_name = mode;
  if (mode.rfind("adaptive", 0) == 0) {
    std::uint32_t rounds = 1;
    if (auto colon = mode.find(':'); colon != std::string::npos) {
      rounds = static_cast<std::uint32_t>(std::stoul(mode.substr(colon + 1)));
    }
    config.rounds = rounds;
    est = run_adaptive(env, config, attacker);
  } else if (mode == "single") {
    auto pairs = default_challenge_pairs();
    Bytes x0 = x0_hex.empty() ? pairs[0].first : from_hex(x0_hex);
    Bytes x1 = x1_hex.empty() ? pairs[0].second : from_hex(x1_hex);
    est = run_single(env, config, attacker, x0, x1);
  } else {
    throw std::invalid_argument("unknown mode '" + mode + "' (single | adaptive:R)");
  }
  ctx.report["command"] = "game run";
  ctx.report["graph"] = path;
  ctx.report["graph_sha256"] = lg.hash;
  ctx.report["attacker"] = attacker;
  ctx.report["mode"] = mode_name;
  ctx.report["evaluator"] = evaluator;
  ctx.report["seed"] = to_hex(seed);
  ctx.report["result"] = advantage_json(est);
  return 0;
}

// --- plot --------------------------------------------------------------------

int cmd_plot(RunContext& ctx, const std::string& kind, const std::vector<std::string>& inputs,
             const std::string& out_path) {
  std::ostringstream data;
  if (kind == "cc-curve") {
    data << "n\tstrategy\tcc\n";
    std::vector<double> xs, ys;
    std::vector<std::tuple<std::uint64_t, std::string, std::uint64_t>> rows;
    for (const auto& in : inputs) {
      ctx.note_input(in);
      json rep = json::parse(read_file(in));
      std::uint64_t n = rep.at("n").get<std::uint64_t>();
      for (auto& [name, cost] : rep.at("strategies").items()) {
        rows.emplace_back(n, name, cost.at("cc").get<std::uint64_t>());
      }
      if (rep.contains("min_cc")) {
        xs.push_back(std::log2(static_cast<double>(n)));
        ys.push_back(std::log2(static_cast<double>(rep.at("min_cc").get<std::uint64_t>())));
      }
    }
    std::sort(rows.begin(), rows.end());
    std::ostringstream body;
    for (const auto& [n, name, cc_value] : rows) body << n << '\t' << name << '\t' << cc_value << '\n';
    std::ostringstream full;
    if (xs.size() >= 2) full << "# loglog_slope " << std::setprecision(17) << fit_slope(xs, ys) << '\n';
    full << data.str() << body.str();
    ctx.emit(out_path, full.str());
  } else if (kind == "advantage") {
    data << "attacker\tevaluator\tadvantage\tadv_ci_low\tadv_ci_high\n";
    std::vector<std::string> rows;
    for (const auto& in : inputs) {
      ctx.note_input(in);
      json rep = json::parse(read_file(in));
      const auto& r = rep.at("result");
      std::ostringstream row;
      row << rep.at("attacker").get<std::string>() << '\t' << rep.at("evaluator").get<std::string>() << '\t'
          << r.at("advantage").get<double>() << '\t' << r.at("adv_ci_low").get<double>() << '\t'
          << r.at("adv_ci_high").get<double>() << '\n';
      rows.push_back(row.str());
    }
    std::sort(rows.begin(), rows.end());
    std::ostringstream full;
    full << data.str();
    for (const auto& r : rows) full << r;
    ctx.emit(out_path, full.str());
  } else {
    throw std::invalid_argument("unknown plot kind '" + kind + "'");
  }
  ctx.report["command"] = "plot";
  ctx.report["kind"] = kind;
  ctx.report["out"] = out_path;
  return 0;
}

// --- repro --------------------------------------------------------------------

int cmd_repro(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  json manifest = json::parse(read_file(manifest_path));
  std::vector<std::string> argv = manifest.at("argv").get<std::vector<std::string>>();
  std::map<std::string, std::string> outputs =
      manifest.at("outputs").get<std::map<std::string, std::string>>();

  fs::path tmp = fs::temp_directory_path() / ("pebblemark-repro-" + manifest.at("report_sha256").get<std::string>().substr(0, 12));
  fs::create_directories(tmp);
  std::map<std::string, std::string> remapped;  // original -> temp
  for (std::size_t i = 0; i < argv.size(); ++i) {
    auto it = outputs.find(argv[i]);
    if (it != outputs.end()) {
      std::string replacement = (tmp / fs::path(argv[i]).filename()).string();
      remapped[argv[i]] = replacement;
      argv[i] = replacement;
    } else if (argv[i] == "--manifest" && i + 1 < argv.size()) {
      // Never clobber the manifest being reproduced.
      argv[i + 1] = (tmp / fs::path(argv[i + 1]).filename()).string();
      ++i;
    }
  }

  std::ostringstream replay_out;
  int rc = run(argv, replay_out, err);
  if (rc != 0) {
    err << "repro: replay exited with code " << rc << "\n";
    return 1;
  }
  std::string replay_text;
  {
    std::string text = replay_out.str();
    auto brace = text.find('{');
    if (brace == std::string::npos) throw std::runtime_error("repro: replay produced no report");
    replay_text = json::parse(text.substr(brace)).dump(2);
  }
  // Paths were remapped into the temp dir; substitute the originals back so
  // the report bytes are comparable.
  for (const auto& [orig, repl] : remapped) {
    std::size_t pos = 0;
    while ((pos = replay_text.find(repl, pos)) != std::string::npos) {
      replay_text.replace(pos, repl.size(), orig);
      pos += orig.size();
    }
  }
  bool ok = true;
  std::string replay_hash = to_hex(
      sha256(std::span(reinterpret_cast<const std::uint8_t*>(replay_text.data()), replay_text.size())));
  if (replay_hash != manifest.at("report_sha256").get<std::string>()) {
    err << "repro: report hash mismatch\n";
    ok = false;
  }
  for (const auto& [orig, hash] : outputs) {
    const std::string& actual_path = remapped.count(orig) ? remapped[orig] : orig;
    std::string actual = file_sha256(actual_path);
    if (actual != hash) {
      // Reports embed user-supplied output paths; undo the temp remapping
      // before declaring a mismatch.
      std::string text = read_file(actual_path);
      for (const auto& [o, r] : remapped) {
        std::size_t pos = 0;
        while ((pos = text.find(r, pos)) != std::string::npos) {
          text.replace(pos, r.size(), o);
          pos += o.size();
        }
      }
      actual = to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
    }
    if (actual != hash) {
      err << "repro: output " << orig << " hash mismatch\n";
      ok = false;
    }
  }
  json rep;
  rep["command"] = "repro";
  rep["manifest"] = manifest_path;
  rep["pass"] = ok;
  out << rep.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ciMHF research workbench: graph gadgets, dynamic pebbling, leakage games"};
  app.name("pebblemark");

  RunContext ctx;

  // graph
  auto* graph = app.add_subcommand("graph", "build and verify graph families");
  auto* gbuild = graph->add_subcommand("build", "construct a graph family member");
  std::string family, flavor = "butterfly", out_path, seed_hex;
  std::uint32_t n = 0, k = 1;
  double eps = 0.5;
  gbuild->add_option("--family", family, "line|grates|superconc|fig4|fig5")->required();
  gbuild->add_option("--n", n, "construction size")->required();
  gbuild->add_option("--eps", eps, "epsilon in (0,1)");
  gbuild->add_option("--k", k, "restriction parameter");
  gbuild->add_option("--seed", seed_hex, "hex seed (default: PEBBLEMARK_SEED or fresh)");
  gbuild->add_option("--flavor", flavor, "superconcentrator flavor");
  gbuild->add_option("--out", out_path, "output graph file")->required();

  auto* gverify = graph->add_subcommand("verify", "audit a graph property");
  std::string check, verify_path, verify_resolver = "uniform";
  std::uint32_t samples = 50;
  gverify->add_option("--check", check, "amenable|superconc|depth-robust")->required();
  gverify->add_option("file", verify_path, "graph file")->required();
  gverify->add_option("--eps", eps, "epsilon for depth-robust");
  gverify->add_option("--samples", samples, "audit sample count");
  gverify->add_option("--seed", seed_hex, "hex seed");
  gverify->add_option("--resolver", verify_resolver, "uniform|keyed (dynamic specs)");

  // pebble
  auto* pebble = app.add_subcommand("pebble", "pebbling strategies and costs");
  auto* pattack = pebble->add_subcommand("attack", "run the generic attack");
  std::string graph_path, resolver = "uniform";
  std::uint32_t eta = 2;
  std::uint64_t stride = 0;
  pattack->add_option("--graph", graph_path, "graph file")->required();
  pattack->add_option("--eta", eta, "depth-reduction parameter");
  pattack->add_option("--g", stride, "light-phase stride (0 = optimal)");
  pattack->add_option("--seed", seed_hex, "resolver material");
  pattack->add_option("--resolver", resolver, "uniform|keyed");

  auto* pvaliant = pebble->add_subcommand("valiant", "compute a depth-reducing set");
  pvaliant->add_option("--graph", graph_path, "graph file")->required();
  pvaliant->add_option("--eta", eta, "depth-reduction parameter")->required();

  auto* psuite = pebble->add_subcommand("suite", "baseline strategies and cc distribution");
  std::uint32_t trials = 1;
  double delta = 0.1;
  std::vector<std::string> strategies{"keep-all", "greedy-discard", "generic-attack"};
  std::uint32_t jobs = 1;
  psuite->add_option("--graph", graph_path, "graph file")->required();
  psuite->add_option("--trials", trials, "resolution trials for the distribution");
  psuite->add_option("--delta", delta, "quantile parameter");
  psuite->add_option("--strategies", strategies, "strategy names")->delimiter(',');
  psuite->add_option("--seed", seed_hex, "resolver material");
  psuite->add_option("--resolver", resolver, "uniform|keyed");
  psuite->add_option("--jobs", jobs, "parallel trials");

  // mhf
  auto* mhf = app.add_subcommand("mhf", "evaluate the memory-hard function");
  auto* meval = mhf->add_subcommand("eval", "run the data-independent evaluator");
  std::string input_hex, coins_hex, trace_out, eval_mode;
  std::string eval_resolver = "keyed";
  std::uint64_t cache = 0;
  std::string policy = "lru";
  bool emit_output = false;
  meval->add_option("--graph", graph_path, "dynamic spec file")->required();
  meval->add_option("--input", input_hex, "input x as hex")->required();
  meval->add_option("--coins", coins_hex, "random coins R as hex")->required();
  meval->add_option("--cache", cache, "cache capacity in labels (0 = required minimum)");
  meval->add_option("--policy", policy, "lru|fifo");
  meval->add_option("--trace", trace_out, "write the leakage trace here");
  meval->add_flag("--emit-output", emit_output, "include the output value in the report");
  meval->add_option("--evaluator", eval_mode, "full|hybrid|noshuffle");
  meval->add_option("--resolver", eval_resolver, "construction rule: uniform|keyed");

  // game
  auto* game = app.add_subcommand("game", "data-independency games");
  auto* grun = game->add_subcommand("run", "estimate an attacker's advantage");
  std::string attacker = "coin-flip", game_mode = "single", evaluator = "full", x0_hex, x1_hex;
  std::uint32_t game_trials = 1000;
  grun->add_option("--graph", graph_path, "dynamic spec file")->required();
  grun->add_option("--attacker", attacker, "attacker name");
  grun->add_option("--trials", game_trials, "number of games");
  grun->add_option("--mode", game_mode, "single | adaptive:R");
  grun->add_option("--evaluator", evaluator, "full|hybrid|noshuffle");
  grun->add_option("--seed", seed_hex, "harness seed");
  grun->add_option("--jobs", jobs, "parallel games");
  grun->add_option("--x0", x0_hex, "challenge input 0 (hex)");
  grun->add_option("--x1", x1_hex, "challenge input 1 (hex)");

  // plot
  auto* plot = app.add_subcommand("plot", "emit columnar data from reports");
  std::string plot_kind;
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  plot->add_option("--kind", plot_kind, "cc-curve|advantage")->required();
  plot->add_option("--in", plot_inputs, "input report files")->required();
  plot->add_option("--out", plot_out, "output data file")->required();

  // repro
  auto* repro = app.add_subcommand("repro", "re-run a manifest and compare hashes");
  std::string manifest_path;
  repro->add_option("manifest", manifest_path, "manifest file")->required();

  std::string manifest_out;
  app.add_option("--manifest", manifest_out, "write the run manifest here")->configurable(false);
  std::string json_out;
  app.add_option("--json", json_out, "write the report here as well as stdout");

  app.require_subcommand(1);
  for (CLI::App* sc : {graph, gbuild, gverify, pebble, pattack, pvaliant, psuite, mhf, meval, game, grun,
                       plot, repro}) {
    sc->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    int code = app.exit(e, msg, msg);
    (code == 0 ? out : err) << msg.str();
    return code == 0 ? 0 : 2;
  }

  // Record resolved argv for the manifest.
  ctx.argv = args;
  bool needs_seed = gbuild->parsed() || pattack->parsed() || psuite->parsed() || grun->parsed() ||
                    (gverify->parsed() && check != "amenable");
  Bytes seed;
  if (needs_seed && seed_hex.empty()) {
    std::vector<std::string> extra;
    seed = parse_seed_flag(seed_hex, extra, err);
    for (auto& e : extra) ctx.argv.push_back(e);
  } else if (!seed_hex.empty()) {
    seed = from_hex(seed_hex);
  }

  int rc = 0;
  try {
    if (gbuild->parsed()) {
      rc = cmd_graph_build(ctx, family, n, eps, k, seed, flavor, out_path);
    } else if (gverify->parsed()) {
      rc = cmd_graph_verify(ctx, check, verify_path, eps, samples, seed, verify_resolver);
    } else if (pattack->parsed()) {
      rc = cmd_pebble_attack(ctx, graph_path, eta, stride, seed, resolver);
    } else if (pvaliant->parsed()) {
      rc = cmd_pebble_valiant(ctx, graph_path, eta);
    } else if (psuite->parsed()) {
      rc = cmd_pebble_suite(ctx, graph_path, trials, delta, strategies, seed, resolver, jobs);
    } else if (meval->parsed()) {
      rc = cmd_mhf_eval(ctx, graph_path, input_hex, coins_hex, cache, policy, trace_out, emit_output,
                        eval_mode, eval_resolver);
    } else if (grun->parsed()) {
      rc = cmd_game_run(ctx, graph_path, attacker, game_trials, game_mode, evaluator, seed, jobs, x0_hex,
                        x1_hex);
    } else if (plot->parsed()) {
      rc = cmd_plot(ctx, plot_kind, plot_inputs, plot_out);
    } else if (repro->parsed()) {
      return cmd_repro(manifest_path, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  ctx.report["tool"] = "pebblemark";
  ctx.report["version"] = kVersion;
  std::string report_text = ctx.report.dump(2);
  out << report_text << "\n";
  if (!json_out.empty()) ctx.emit(json_out, report_text + "\n");

  if (!manifest_out.empty()) {
    write_file(manifest_out, manifest_json(ctx).dump(2) + "\n");
  } else if (!ctx.outputs.empty()) {
    // Default manifest next to the first output artifact.
    fs::path first = ctx.outputs.begin()->first;
    write_file(first.string() + ".manifest.json", manifest_json(ctx).dump(2) + "\n");
  }
  return rc;
}

}  // namespace pebblemark::cli
