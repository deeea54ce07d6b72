// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Tolerances and thresholds are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "pebblemark/builders.hpp"
#include "pebblemark/game.hpp"
#include "pebblemark/mhf.hpp"
#include "pebblemark/pebbling.hpp"
#include "pebblemark/stats.hpp"
#include "support/oracles.hpp"

using namespace pebblemark;
namespace oracle = pebblemark::testing;
namespace fs = std::filesystem;

namespace {

Bytes seed_of(std::uint64_t n) {
  Bytes b;
  append_u64(b, n);
  return b;
}

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

struct Criterion {
  int id;
  std::string name;
  std::function<void(Checker&)> body;
};

// --- 1. output/key independence ---------------------------------------------

void criterion_output_key_independence(Checker& c) {
  Oracle h(seed_of(1), 32);
  for (std::uint64_t graph_seed : {10ull, 11ull}) {
    SampledConstruction f5 = sample_fig5(64, 0.5, 8, seed_of(graph_seed));
    for (std::uint64_t i = 0; i < 50; ++i) {
      SeededRng rng(derive_seed(seed_of(2), "triple", graph_seed * 100 + i));
      Bytes x = rng.bytes(16);
      Bytes k1 = rng.bytes(32);
      Bytes k2 = rng.bytes(32);
      TieredMemory m1(required_cache_capacity(f5.spec), EvictionPolicy::Lru, h.width());
      TieredMemory m2(required_cache_capacity(f5.spec), EvictionPolicy::Lru, h.width());
      EvalOptions opts;
      opts.skip_amenability_check = i != 0;
      Bytes out1 = mhf_eval(f5.spec, h, x, k1, m1, opts).output;
      Bytes out2 = mhf_eval(f5.spec, h, x, k2, m2, opts).output;
      c.require(out1 == out2, "outputs differ across keys at triple " + std::to_string(i));
      if (!c.ok) return;
    }
  }
}

// --- 2. shuffle leakage silence ----------------------------------------------

void criterion_shuffle_silence(Checker& c) {
  Oracle h(seed_of(1), 32);
  SampledConstruction f5 = sample_fig5(64, 0.5, 8, seed_of(10));
  std::uint64_t capacity = 2 * 8 + 4;
  for (EvictionPolicy policy : {EvictionPolicy::Lru, EvictionPolicy::Fifo}) {
    std::optional<std::vector<std::uint64_t>> flush_addrs;
    for (std::uint64_t key = 0; key < 8; ++key) {
      TieredMemory mem(capacity, policy, h.width());
      EvalOptions opts;
      opts.skip_amenability_check = true;
      EvalResult res = mhf_eval(f5.spec, h, seed_of(3), seed_of(4000 + key), mem, opts);
      std::vector<std::uint64_t> flushes;
      for (const auto& span : res.phases) {
        auto events = res.leakage.events_in_rounds(span.round_begin, span.round_end);
        if (span.name == "shuffle") {
          for (const auto& e : events) {
            c.require(e.kind != AccessEvent::Kind::Request, "request during the in-cache shuffle");
            c.require(false, "event during the in-cache shuffle");
          }
        } else if (span.name == "shuffle-flush") {
          std::uint64_t prev = 0;
          for (const auto& e : events) {
            c.require(e.kind == AccessEvent::Kind::Store, "non-store event in the flush segment");
            c.require(e.addr > prev, "flush stores not strictly ascending");
            prev = e.addr;
            flushes.push_back(e.addr);
          }
        }
      }
      c.require(!flushes.empty(), "no flush events recorded");
      if (!flush_addrs) {
        flush_addrs = flushes;
      } else {
        c.require(flushes == *flush_addrs, "flush store sequence differs across keys");
      }
      if (!c.ok) return;
    }
  }
}

// --- 3. independency game ------------------------------------------------------

void criterion_independency_game(Checker& c) {
  SampledConstruction f5 = sample_fig5(64, 0.5, 8, seed_of(10));
  auto spec = std::make_shared<DynamicGraphSpec>(f5.spec);
  auto pairs = default_challenge_pairs();
  GameConfig config;
  config.trials = 1000;
  config.seed = seed_of(30);
  config.jobs = 4;

  GameEnv full{spec, Oracle(seed_of(1), 32), EvaluatorMode::Full, 0, EvictionPolicy::Lru};
  AdvantageEstimate shuffled = run_single(full, config, "exact-match", pairs[0].first, pairs[0].second);
  c.require(shuffled.adv_ci_high < 0.05,
            "full-evaluator advantage CI upper bound " + std::to_string(shuffled.adv_ci_high) + " >= 0.05");

  GameEnv ablated{spec, Oracle(seed_of(1), 32), EvaluatorMode::NoShuffle, 0, EvictionPolicy::Lru};
  AdvantageEstimate naked = run_single(ablated, config, "exact-match", pairs[0].first, pairs[0].second);
  c.require(naked.advantage > 0.45,
            "no-shuffle advantage " + std::to_string(naked.advantage) + " <= 0.45");
}

// --- 4. hybrid consistency ------------------------------------------------------

void criterion_hybrid_consistency(Checker& c) {
  // Block size 8 (k = 4); first-access position inside block 1 over 10^4
  // trials per evaluator; two-sample chi-square at significance 0.01.
  Oracle h(seed_of(1), 32);
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(40));
  const std::uint32_t trials = 10000;
  NodeId block1_lo = f5.layout.offsets[0];
  std::vector<std::uint64_t> prf_hist(8, 0), trp_hist(8, 0);
  EvalOptions opts;
  opts.skip_amenability_check = true;
  for (std::uint32_t i = 0; i < trials; ++i) {
    TieredMemory m1(required_cache_capacity(f5.spec), EvictionPolicy::Lru, h.width());
    EvalResult full = mhf_eval(f5.spec, h, seed_of(5), seed_of(50000 + i), m1, opts);
    TieredMemory m2(required_cache_capacity(f5.spec), EvictionPolicy::Lru, h.width());
    EvalResult hybrid = mhf_eval_hybrid(f5.spec, h, seed_of(5), seed_of(90000 + i), m2, opts);
    for (auto [res, hist] : {std::pair{&full, &prf_hist}, std::pair{&hybrid, &trp_hist}}) {
      for (const auto& span : res->phases) {
        if (span.name != "walk") continue;
        for (const auto& e : res->leakage.events_in_rounds(span.round_begin, span.round_end)) {
          if (e.kind == AccessEvent::Kind::Request && e.addr >= block1_lo && e.addr < block1_lo + 8) {
            (*hist)[e.addr - block1_lo] += 1;
            goto next_eval;
          }
        }
      }
    next_eval:;
    }
  }
  TwoSampleChiSquare test = two_sample_chi_square(prf_hist, trp_hist);
  double crit = chi_square_critical_01(test.df);
  c.require(test.stat < crit, "chi-square " + std::to_string(test.stat) + " >= critical " +
                                  std::to_string(crit) + " at df " + std::to_string(test.df));
}

// --- 5. valiant bounds -----------------------------------------------------------

void criterion_valiant_bounds(Checker& c) {
  std::uint64_t graph_index = 0;
  for (std::uint32_t n : {64u, 256u, 1024u}) {
    for (std::uint64_t s = 0; s < 17; ++s) {
      Dag g = random_dag(n, 2, seed_of(500 + graph_index++));
      for (std::uint32_t eta : {1u, 2u, 3u}) {
        std::vector<NodeId> set = valiant_reduce(g, eta);
        std::uint64_t e = AttackParams::e_bound(n, g.indeg_bound(), eta);
        std::uint64_t d = AttackParams::d_bound(n, eta);
        c.require(set.size() <= e, "witness too big at n=" + std::to_string(n));
        std::set<NodeId> removed(set.begin(), set.end());
        std::uint32_t dep = oracle::longest_path_edge_list(n, oracle::edge_list(g), removed);
        c.require(dep <= d, "depth " + std::to_string(dep) + " > " + std::to_string(d) + " at n=" +
                                std::to_string(n) + " eta=" + std::to_string(eta));
        if (!c.ok) return;
      }
    }
  }
}

// --- 6. algorithm-1 soundness and cost --------------------------------------------

void criterion_attack_cost(Checker& c) {
  SampledConstruction f4 = sample_fig4(256, 0.5, 16, seed_of(60));
  auto spec = std::make_shared<DynamicGraphSpec>(f4.spec);
  AttackParams params;
  params.eta = 2;  // stride defaults to the analysis optimum n / sqrt(k 2^eta)
  AttackResult res = generic_attack(spec, params, seed_of(61));
  c.require(check_legal(res.trace), "attack trace is illegal");
  std::uint64_t bound = attack_cost_bound(spec->total_nodes(), spec->k(), spec->indeg_bound(),
                                          res.params.eta, res.params.g);
  c.require(res.report.cc <= 4 * bound, "cc " + std::to_string(res.report.cc) + " > 4 * " +
                                            std::to_string(bound));
}

// --- 7. superconcentrator and the ancestor bound ------------------------------------

void criterion_superconcentrator(Checker& c) {
  for (std::uint32_t n : {4u, 8u, 16u}) {
    IoDag sc = superconcentrator(n, ScFlavor::Butterfly);
    SeededRng rng(seed_of(70 + n));
    auto inputs = sc.input_ids();
    auto outputs = sc.output_ids();
    auto sample_subset = [&rng](const std::vector<NodeId>& pool, std::uint32_t q) {
      std::vector<NodeId> copy = pool;
      for (std::uint32_t i = 0; i < q; ++i) std::swap(copy[i], copy[i + rng.below(copy.size() - i)]);
      copy.resize(q);
      return copy;
    };
    // 200 sampled subset pairs per size class
    for (std::uint32_t q = 1; q <= n; ++q) {
      for (std::uint32_t trial = 0; trial < 200 / n; ++trial) {
        auto s1 = sample_subset(inputs, q);
        auto s2 = sample_subset(outputs, q);
        std::uint32_t flow = node_disjoint_paths(sc.dag, s1, s2);
        c.require(flow == q, "flow " + std::to_string(flow) + " != " + std::to_string(q) + " at n=" +
                                 std::to_string(n));
        if (!c.ok) return;
      }
    }
    // 200 sampled (S, Y) pairs with |S| < |Y|
    for (std::uint32_t trial = 0; trial < 200; ++trial) {
      std::uint32_t y_size = 1 + static_cast<std::uint32_t>(rng.below(n));
      std::uint32_t s_size = static_cast<std::uint32_t>(rng.below(y_size));
      std::set<NodeId> y_set, s_set;
      while (y_set.size() < y_size) y_set.insert(outputs[rng.below(outputs.size())]);
      while (s_set.size() < s_size) s_set.insert(static_cast<NodeId>(1 + rng.below(sc.dag.size())));
      RemoveResult reduced = remove(sc.dag, std::vector<NodeId>(s_set.begin(), s_set.end()));
      std::vector<NodeId> mapped;
      for (NodeId v : y_set) {
        if (reduced.old_to_new[v]) mapped.push_back(reduced.old_to_new[v]);
      }
      auto anc = oracle::ancestors_bfs(reduced.dag, mapped);
      for (NodeId v : mapped) anc.insert(v);
      std::uint32_t hit = 0;
      for (NodeId v : anc) {
        if (reduced.new_to_old[v - 1] <= n) ++hit;
      }
      c.require(hit + s_size >= n, "ancestor bound violated at n=" + std::to_string(n));
      if (!c.ok) return;
    }
  }
}

// --- 8. amenability ------------------------------------------------------------------

void criterion_amenability(Checker& c) {
  for (auto [n, k] : {std::pair{64u, 8u}, std::pair{256u, 16u}}) {
    SampledConstruction f5 = sample_fig5(n, 0.5, k, seed_of(80 + n));
    AmenabilityReport rep = check_amenable(f5.spec);
    c.require(rep.pass, "fig5 (" + std::to_string(n) + ", " + std::to_string(k) + ") not amenable");
    SampledConstruction f4 = sample_fig4(n, 0.5, k, seed_of(90 + n));
    AmenabilityReport rep4 = check_amenable(f4.spec, 16);
    bool collision_failed = false;
    bool others_ok = true;
    for (const auto& clause : rep4.clauses) {
      if (clause.name == "no-parent-collisions") {
        collision_failed = !clause.pass;
      } else {
        others_ok = others_ok && clause.pass;
      }
    }
    c.require(collision_failed && others_ok && !rep4.pass,
              "fig4 (" + std::to_string(n) + ") did not fail exactly the collision clause");
  }
}

// --- 9. pebbling oracle equivalence ----------------------------------------------------

void criterion_pebbling_oracle(Checker& c) {
  for (std::uint32_t n = 1; n <= 5; ++n) {
    std::uint64_t optimum = oracle::minimal_sequential_cc(Dag::line(n), n);
    c.require(optimum == 2ull * n - 1,
              "exhaustive optimum at n=" + std::to_string(n) + " is " + std::to_string(optimum));
    auto spec = std::make_shared<DynamicGraphSpec>(Dag::line(n), std::vector<std::vector<NodeId>>{}, 1);
    std::uint64_t greedy = run_greedy_discard(spec, seed_of(0)).report.cc;
    c.require(greedy == optimum, "greedy-discard " + std::to_string(greedy) + " != optimum at n=" +
                                     std::to_string(n));
  }
}

// --- 10. cost trend ---------------------------------------------------------------------

void criterion_cost_trend(Checker& c) {
  auto attack_cc = [](std::shared_ptr<const DynamicGraphSpec> spec, Bytes material) {
    AttackParams params;
    params.eta = 2;
    return generic_attack(spec, params, std::move(material)).report.cc;
  };
  std::vector<double> xs, ys;
  for (std::uint32_t n : {256u, 512u, 1024u, 2048u}) {
    // k ~ sqrt(N) rounded up to the next power of two so it divides N
    std::uint32_t k = 1;
    while (k * k < n) k *= 2;
    SampledConstruction f5 = sample_fig5(n, 0.5, k, seed_of(100 + n));
    auto spec = std::make_shared<DynamicGraphSpec>(f5.spec);
    std::uint64_t cost = attack_cc(spec, seed_of(200 + n));
    xs.push_back(std::log2(static_cast<double>(n)));
    ys.push_back(std::log2(static_cast<double>(cost)));
  }
  double fig5_slope = fit_slope(xs, ys);
  c.require(fig5_slope >= 1.8, "fig5 slope " + std::to_string(fig5_slope) + " < 1.8");

  xs.clear();
  ys.clear();
  for (std::uint32_t n : {256u, 512u, 1024u, 2048u}) {
    auto spec = std::make_shared<DynamicGraphSpec>(random_kspec(n, 1, seed_of(300 + n)));
    std::uint64_t cost = attack_cc(spec, seed_of(400 + n));
    xs.push_back(std::log2(static_cast<double>(n)));
    ys.push_back(std::log2(static_cast<double>(cost)));
  }
  double static_slope = fit_slope(xs, ys);
  c.require(static_slope <= 1.95, "k=1 static slope " + std::to_string(static_slope) + " > 1.95");
}

// --- 11. determinism / replay --------------------------------------------------------------

void criterion_repro(Checker& c) {
  fs::path dir = fs::temp_directory_path() / "pebblemark-acceptance";
  fs::create_directories(dir);
  auto run_cli = [&](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int rc = pebblemark::cli::run(args, out, err);
    return std::pair{rc, out.str()};
  };

  fs::path graph = dir / "accept.dyn";
  fs::path manifest = dir / "accept.manifest.json";
  auto [rc1, out1] = run_cli({"graph", "build", "--family", "fig5", "--n", "16", "--k", "4", "--seed",
                              "c0ffee", "--out", graph.string(), "--manifest", manifest.string()});
  c.require(rc1 == 0, "graph build failed");
  if (!c.ok) return;
  auto [rc_repro, repro_out] = run_cli({"repro", manifest.string()});
  c.require(rc_repro == 0, "graph build manifest did not reproduce");

  fs::path trace = dir / "accept.trace";
  fs::path trace_manifest = dir / "accept.trace.manifest.json";
  auto [rc2, out2] = run_cli({"mhf", "eval", "--graph", graph.string(), "--input", "00ff", "--coins", "1234",
                              "--trace", trace.string(), "--emit-output", "--manifest",
                              trace_manifest.string()});
  c.require(rc2 == 0, "mhf eval failed");
  if (!c.ok) return;
  auto [rc3, out3] = run_cli({"repro", trace_manifest.string()});
  c.require(rc3 == 0, "mhf eval manifest did not reproduce");

  fs::path game_report = dir / "accept.game.json";
  fs::path game_manifest = dir / "accept.game.manifest.json";
  auto [rc4, out4] = run_cli({"game", "run", "--graph", graph.string(), "--attacker", "exact-match",
                              "--trials", "25", "--evaluator", "full", "--seed", "517", "--json",
                              game_report.string(), "--manifest", game_manifest.string()});
  c.require(rc4 == 0, "game run failed");
  if (!c.ok) return;
  auto [rc5, out5] = run_cli({"repro", game_manifest.string()});
  c.require(rc5 == 0, "game manifest did not reproduce");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "output/key independence (fig5 N=64 k=8, 100 triples, exact)", criterion_output_key_independence},
      {2, "shuffle leakage silence (capacity 2k+4, LRU+FIFO, exact)", criterion_shuffle_silence},
      {3, "independency game (T=1000: full CI < 0.05, ablation > 0.45)", criterion_independency_game},
      {4, "hybrid consistency (10^4 trials, block 8, chi-square at 0.01)", criterion_hybrid_consistency},
      {5, "valiant bounds (50 graphs x eta in {1,2,3}, oracle-checked, exact)", criterion_valiant_bounds},
      {6, "algorithm-1 soundness and cost (fig4 N=256 k=16, cc <= 4x bound)", criterion_attack_cost},
      {7, "superconcentrator flows and ancestor bound (N in {4,8,16}, exact)", criterion_superconcentrator},
      {8, "amenability verdicts (fig5 pass, fig4 collision failure)", criterion_amenability},
      {9, "pebbling oracle equivalence (L_n optimum = 2n-1 = greedy)", criterion_pebbling_oracle},
      {10, "cost trend (fig5 slope >= 1.8, k=1 static slope <= 1.95)", criterion_cost_trend},
      {11, "determinism/replay (manifest repro, byte-identical hashes)", criterion_repro},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    Checker checker;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(checker);
    } catch (const std::exception& e) {
      checker.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (checker.ok ? "PASS" : "FAIL") << " criterion " << criterion.id << " (" << std::fixed
         << std::setprecision(2) << secs << "s): " << criterion.name;
    if (!checker.ok) line << " -- " << checker.detail;
    std::cout << line.str() << std::endl;
    failures += checker.ok ? 0 : 1;
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all 11 criteria passed" << std::endl;
  return 0;
}
