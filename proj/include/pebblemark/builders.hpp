#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pebblemark/dag.hpp"
#include "pebblemark/rand.hpp"

namespace pebblemark {

/// A DAG with designated interface sets: inputs are the first `inputs` nodes,
/// outputs the last `outputs` nodes. Builders keep interfaces in these
/// positions so overlay composition is pure index arithmetic.
struct IoDag {
  Dag dag;
  std::uint32_t inputs = 0;
  std::uint32_t outputs = 0;

  std::vector<NodeId> input_ids() const;
  std::vector<NodeId> output_ids() const;
};

/// Empirical depth-robustness estimate for a built family member. gamma and c
/// come from the audit below, never from the cited asymptotic constants.
struct DepthRobustProfile {
  double e_target = 0;   // audited node-count fraction (== gamma)
  std::uint32_t d_target = 0;
  double gamma = 0;
  double c = 0;
  double epsilon = 0;
  bool downgraded = false;  // an audited attack got below d_target
};

struct BlockLayout {
  std::uint32_t n_blocks = 0;
  std::uint32_t block_size = 0;
  std::vector<NodeId> offsets;  // first node id of each block

  NodeId block_start(std::uint32_t j) const { return offsets.at(j - 1); }  // 1-based j
};

Dag line_graph(std::uint32_t n);

/// Layered stand-in for a constant-indegree depth-robust family:
/// ceil(1/epsilon) layers of n nodes, each node keeping its horizontal
/// predecessor plus two seeded edges from the previous layer. The profile is
/// an audit estimate, not a theorem.
struct DepthRobustStack {
  IoDag graph;
  DepthRobustProfile profile;
};
DepthRobustStack depth_robust_stack(std::uint32_t n, double epsilon, std::span<const std::uint8_t> seed);

/// Re-audit an arbitrary graph against the (gamma*n, n^{1-eps}/4) target using
/// the Valiant-based reduction search. `n` is the interface width the profile
/// constants are quoted against.
DepthRobustProfile audit_depth_robust(const Dag& g, std::uint32_t n, double epsilon);

enum class ScFlavor { Butterfly, Recursive };

/// Superconcentrator with n inputs and n outputs (n a power of two): the wire
/// graph of a Benes switching network, indegree 2, 2*log2(n) levels.
IoDag superconcentrator(std::uint32_t n, ScFlavor flavor = ScFlavor::Butterfly);

/// Literal graph overlay: h's node set, h's edges plus g1's edges on h's
/// sources plus g2's edges shifted onto h's sinks.
IoDag overlay(const Dag& g1, const IoDag& h, const Dag& g2);

/// Composition step used by the samplers: identify `gadget`'s inputs with
/// `base`'s outputs and append the rest of the gadget.
IoDag glue_onto_outputs(const IoDag& base, const IoDag& gadget);

/// overlay(G, SC_N, L_N) and overlay(G, grates_{N,eps}, L_N) where G is the
/// accumulated composite and its N designated outputs feed the gadget.
IoDag superconc_overlay(const IoDag& g, ScFlavor flavor = ScFlavor::Butterfly);
IoDag grates_overlay(const IoDag& g, double epsilon, std::span<const std::uint8_t> seed);

struct BlockPartitionResult {
  DynamicGraphSpec spec;
  BlockLayout layout;
};

/// Append N path nodes whose extra parent is drawn per-block round-robin from
/// the host's N outputs (k-restricted, uniform resolver).
BlockPartitionResult block_partition(const IoDag& g, std::uint32_t k, std::span<const std::uint8_t> seed);

/// Collision-resistant variant over 2N outputs: blocks of size 2k, keyed
/// permutation resolver guaranteeing pairwise-distinct parents per block.
BlockPartitionResult cr_block_partition(const IoDag& g, std::uint32_t k);

struct SampledConstruction {
  DynamicGraphSpec spec;
  BlockLayout layout;
  std::uint32_t n = 0;      // the construction parameter N
  std::uint32_t alpha = 0;  // static prefix size == alpha * n
  DepthRobustProfile grates_profile;
};

/// Fig.-4-style sampler: grates -> superconcentrator overlay -> grates overlay
/// -> block partition.
SampledConstruction sample_fig4(std::uint32_t n, double epsilon, std::uint32_t k,
                                std::span<const std::uint8_t> seed);

/// Fig.-5-style sampler: the same stack over 2N-wide interfaces finished by
/// the collision-resistant block partition (2k-restricted final layer).
SampledConstruction sample_fig5(std::uint32_t n, double epsilon, std::uint32_t k,
                                std::span<const std::uint8_t> seed);

/// Groups of the dynamic suffix: nodes sharing one potential-parent set, in
/// first-appearance order. group_of is indexed by dynamic-node ordinal.
struct SuffixGroups {
  std::uint32_t n_groups = 0;
  std::vector<std::uint32_t> group_of;            // 1-based group ids
  std::vector<std::vector<NodeId>> group_nodes;   // per group
  std::vector<std::vector<NodeId>> group_parents; // the shared R-set per group
};
SuffixGroups derive_suffix_groups(const DynamicGraphSpec& spec);

struct ClauseResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AmenabilityReport {
  std::vector<ClauseResult> clauses;
  bool pass = false;
  std::uint32_t n_groups = 0;
  std::uint32_t group_size = 0;
  std::uint32_t parent_set_size = 0;
};

/// Evaluate the seven structural conditions that make per-block in-cache
/// shuffles a sound leakage equalizer. The collision clause combines resolver
/// certification with `trials` sampled resolutions.
AmenabilityReport check_amenable(const DynamicGraphSpec& spec, std::uint32_t trials = 8);

/// Random constant-indegree DAG: node v>1 gets parent v-1 plus delta-1 seeded
/// random parents. Audit corpus for the reduction bounds.
Dag random_dag(std::uint32_t n, std::uint32_t delta, std::span<const std::uint8_t> seed);

/// Random k-restricted dynamic path spec (static two-node prefix, every later
/// node i draws R_i as a seeded k-subset of [1, i-2]).
DynamicGraphSpec random_kspec(std::uint32_t n, std::uint32_t k, std::span<const std::uint8_t> seed);

/// Number of node-disjoint paths from `sources` to `sinks` (node-split
/// max-flow, unit capacities). Audit oracle for the superconcentrator
/// property.
std::uint32_t node_disjoint_paths(const Dag& g, std::span<const NodeId> sources,
                                  std::span<const NodeId> sinks);

struct ScAuditResult {
  bool pass = false;
  std::uint32_t samples = 0;
  std::uint32_t failures = 0;
  std::string detail;
};

/// Sampled subset-pair audit of the disjoint-paths property plus the
/// ancestor-count lower bound (|I ∩ ancestors_{G-S}(Y)| >= N - |S|).
ScAuditResult audit_superconcentrator(const IoDag& sc, std::uint32_t samples_per_size,
                                      std::span<const std::uint8_t> seed);

}  // namespace pebblemark
