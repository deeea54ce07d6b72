#include <doctest.h>

#include <set>

#include "pebblemark/builders.hpp"
#include "pebblemark/dag.hpp"
#include "pebblemark/rand.hpp"
#include "support/oracles.hpp"

using namespace pebblemark;
namespace oracle = pebblemark::testing;

namespace {

Bytes seed_of(std::uint64_t n) {
  Bytes b;
  append_u64(b, n);
  return b;
}

}  // namespace

TEST_CASE("parents of a line graph") {
  Dag l5 = Dag::line(5);
  CHECK(l5.parents(3) == std::vector<NodeId>{2});
  CHECK(l5.parents(1).empty());
  CHECK_THROWS_AS((void)l5.parents(6), std::out_of_range);
  CHECK_THROWS_AS((void)l5.parents(0), std::out_of_range);
}

TEST_CASE("resolved dynamic parents come from the declared sets") {
  SampledConstruction c = sample_fig4(16, 0.5, 4, seed_of(7));
  for (int trial = 0; trial < 8; ++trial) {
    ResolvedDynamicGraph resolved = resolve_all(c.spec, seed_of(trial));
    for (std::uint32_t t = 1; t <= c.spec.dynamic_nodes(); ++t) {
      NodeId v = c.spec.prefix_nodes() + t;
      const auto& pool = c.spec.potential_parents(v);
      NodeId r = resolved.resolved[t - 1];
      CHECK(std::binary_search(pool.begin(), pool.end(), r));
      // last node's parents are {v-1, r(v)}
      auto ps = resolved.dag.parents(v);
      CHECK(ps.size() == 2);
      CHECK(ps[1] == v - 1);
      CHECK(ps[0] == r);
    }
  }
}

TEST_CASE("ancestors of a path and a source") {
  Dag l5 = Dag::line(5);
  std::vector<NodeId> q{5};
  auto anc = ancestors(l5, q);
  CHECK(anc == std::vector<NodeId>{1, 2, 3, 4});
  std::vector<NodeId> src{1};
  CHECK(ancestors(l5, src).empty());
}

TEST_CASE("ancestors equals the reverse-BFS oracle on random dags") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Dag g = random_dag(12, 3, seed_of(s));
    SeededRng rng(seed_of(100 + s));
    std::vector<NodeId> targets;
    for (NodeId v = 1; v <= g.size(); ++v) {
      if (rng.coin()) targets.push_back(v);
    }
    if (targets.empty()) targets.push_back(static_cast<NodeId>(1 + rng.below(g.size())));
    auto got = ancestors(g, targets);
    auto want = oracle::ancestors_bfs(g, targets);
    CHECK(std::set<NodeId>(got.begin(), got.end()) == want);
  }
}

TEST_CASE("ancestors monotonicity") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Dag g = random_dag(24, 3, seed_of(40 + s));
    std::vector<NodeId> small{3, 7};
    std::vector<NodeId> big{3, 7, 15, 20};
    auto a_small = ancestors(g, small);
    auto a_big = ancestors(g, big);
    std::set<NodeId> big_set(a_big.begin(), a_big.end());
    for (NodeId v : a_small) CHECK(big_set.count(v));
  }
}

TEST_CASE("depth of lines, single nodes and overlay graphs") {
  CHECK(depth(Dag::line(7)) == 7);
  CHECK(depth(Dag::line(1)) == 1);
  for (std::uint64_t s = 0; s < 6; ++s) {
    DepthRobustStack stack = depth_robust_stack(16, 0.5, seed_of(s));
    IoDag g = superconc_overlay(stack.graph);
    REQUIRE(g.dag.size() <= 200);
    CHECK(depth(g.dag) == oracle::longest_path_edge_list(g.dag.size(), oracle::edge_list(g.dag), {}));
  }
}

TEST_CASE("remove yields the induced subgraph") {
  Dag l5 = Dag::line(5);
  SUBCASE("splitting a path") {
    RemoveResult r = remove(l5, std::vector<NodeId>{3});
    CHECK(r.dag.size() == 4);
    CHECK(depth(r.dag) == 2);
    CHECK(r.old_to_new[3] == 0);
    CHECK(r.new_to_old == std::vector<NodeId>{1, 2, 4, 5});
  }
  SUBCASE("empty removal is the identity") {
    RemoveResult r = remove(l5, {});
    CHECK(r.dag == l5);
  }
  SUBCASE("counts match the filter oracle on random graphs") {
    for (std::uint64_t s = 0; s < 12; ++s) {
      Dag g = random_dag(30, 3, seed_of(200 + s));
      SeededRng rng(seed_of(300 + s));
      std::set<NodeId> drop;
      for (NodeId v = 1; v <= g.size(); ++v) {
        if (rng.below(3) == 0) drop.insert(v);
      }
      RemoveResult r = remove(g, std::vector<NodeId>(drop.begin(), drop.end()));
      CHECK(r.dag.size() == g.size() - drop.size());
      std::uint64_t expect_edges = 0;
      for (auto [u, v] : oracle::edge_list(g)) {
        if (!drop.count(u) && !drop.count(v)) ++expect_edges;
      }
      CHECK(r.dag.edge_count() == expect_edges);
    }
  }
}

TEST_CASE("remove/prefix depth matches the edge-list DP oracle") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    Dag g = random_dag(256, 3, seed_of(500 + s));
    SeededRng rng(seed_of(600 + s));
    std::set<NodeId> drop;
    for (NodeId v = 1; v <= g.size(); ++v) {
      if (rng.below(4) == 0) drop.insert(v);
    }
    std::uint32_t got = depth(remove(g, std::vector<NodeId>(drop.begin(), drop.end())).dag);
    std::uint32_t want = oracle::longest_path_edge_list(g.size(), oracle::edge_list(g), drop);
    CHECK(got == want);
  }
}

TEST_CASE("prefix") {
  Dag l5 = Dag::line(5);
  CHECK(prefix(l5, 3) == Dag::line(3));
  CHECK(prefix(l5, 5) == l5);
  CHECK_THROWS_AS(prefix(l5, 6), std::out_of_range);
}

TEST_CASE("reducibility witness") {
  Dag l8 = Dag::line(8);
  CHECK(check_reducibility_witness(l8, std::vector<NodeId>{4}, 4));
  CHECK_FALSE(check_reducibility_witness(l8, std::vector<NodeId>{4}, 3));
  std::vector<NodeId> all{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(check_reducibility_witness(l8, all, 0));
}

TEST_CASE("serialize round trip and format") {
  Dag l3 = Dag::line(3);
  CHECK(serialize(l3) == "dag 3 1\n1:\n2: 1\n3: 2\n");
  CHECK(parse_dag(serialize(l3)) == l3);

  DynamicGraphSpec spec(Dag::line(4), {{1, 2}}, 2);
  std::string text = serialize(spec);
  CHECK(text.find("5 ? 1 2") != std::string::npos);
  CHECK(parse_dynamic_spec(text) == spec);
}

TEST_CASE("parse is a fixed point of serialize on fuzzed graphs") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Dag g = random_dag(1 + s % 40, 1 + s % 4, seed_of(900 + s));
    std::string text = serialize(g);
    Dag again = parse_dag(text);
    CHECK(serialize(again) == text);
  }
  for (std::uint64_t s = 0; s < 20; ++s) {
    DynamicGraphSpec spec = random_kspec(5 + s, 1 + s % 5, seed_of(1000 + s));
    std::string text = serialize(spec);
    DynamicGraphSpec again = parse_dynamic_spec(text);
    CHECK(serialize(again) == text);
  }
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_dag(""), ParseError);
  try {
    parse_dag("dag 2 1\n1:\n2: 5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_dag("dag 2 1\n1:\nbogus\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_dag("dyn 4 1 4\n1:\n2: 1\n3: 1\n4: 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dynamic_spec("dag 1 1\n1:\n"), std::invalid_argument);
  // topological violation inside the suffix
  CHECK_THROWS_AS(parse_graph("dyn 4 1 2\n1:\n2: 1\n3 ? 2\n4 ? 1\n"), ParseError);
}

TEST_CASE("edge order invariant holds after construction") {
  CHECK_THROWS_AS(Dag(2, {{}, {2}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Dag(2, {{2}, {}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Dag(3, {{}, {1}, {1, 2}}, 1), std::invalid_argument);  // indegree bound
}

TEST_CASE("graph hash is stable across identical builds") {
  SampledConstruction a = sample_fig5(16, 0.5, 4, seed_of(1));
  SampledConstruction b = sample_fig5(16, 0.5, 4, seed_of(1));
  SampledConstruction c = sample_fig5(16, 0.5, 4, seed_of(2));
  CHECK(graph_hash(a.spec) == graph_hash(b.spec));
  CHECK(graph_hash(a.spec) != graph_hash(c.spec));
}
