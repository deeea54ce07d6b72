#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pebblemark/dag.hpp"

namespace pebblemark {

enum class PebblingMode { Sequential, Parallel };

enum class PebblePhase : std::uint8_t { Light, Balloon, Repebble };

/// One pebbling round as a delta against the previous configuration. Additions
/// must be absent before the round and removals present; big parallel traces
/// stay compact this way.
struct TraceRound {
  std::vector<NodeId> added;
  std::vector<NodeId> removed;
  PebblePhase phase = PebblePhase::Light;
};

/// When a dynamic edge was fixed. Legality requires the resolution round to be
/// no earlier than the first round that pebbled node-1.
struct ResolutionEvent {
  NodeId node = 0;
  NodeId parent = 0;
  std::uint32_t round = 0;
};

/// A pebbling of either a static DAG or a dynamic spec. For dynamic traces the
/// resolved edges ride along so the checker can replay the reveal timing.
class PebblingTrace {
 public:
  PebblingTrace(std::shared_ptr<const Dag> graph, PebblingMode mode);
  PebblingTrace(std::shared_ptr<const DynamicGraphSpec> spec, PebblingMode mode);

  PebblingMode mode() const { return mode_; }
  std::uint32_t universe() const;
  const std::vector<TraceRound>& rounds() const { return rounds_; }
  const std::vector<ResolutionEvent>& resolutions() const { return resolutions_; }

  const Dag* static_graph() const { return graph_.get(); }
  const DynamicGraphSpec* dynamic_spec() const { return spec_.get(); }

  void push_round(TraceRound round) { rounds_.push_back(std::move(round)); }
  void record_resolution(NodeId node, NodeId parent, std::uint32_t round) {
    resolutions_.push_back(ResolutionEvent{node, parent, round});
  }

  /// Appends `tail`, whose rounds must replay cleanly from this trace's final
  /// configuration. cc of the result is the sum of the parts.
  void concat(const PebblingTrace& tail);

 private:
  std::shared_ptr<const Dag> graph_;
  std::shared_ptr<const DynamicGraphSpec> spec_;
  PebblingMode mode_;
  std::vector<TraceRound> rounds_;
  std::vector<ResolutionEvent> resolutions_;
};

struct LegalityReport {
  bool ok = true;
  std::string reason;
};

/// Replay the trace and verify: additions have all parents pebbled in the
/// previous round AND surviving through this round (a parent cannot be
/// discarded in the round it is consumed), sequential traces add at most one
/// pebble per round, and dynamic parents are only consumed after their edge
/// was resolvable.
LegalityReport check_legal_report(const PebblingTrace& trace);
bool check_legal(const PebblingTrace& trace);

class LegalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CostReport {
  std::uint64_t cc = 0;
  std::uint64_t rounds = 0;
  std::uint64_t light_cc = 0;
  std::uint64_t balloon_cc = 0;
  std::uint64_t repebble_cc = 0;
};

/// Cumulative cost: sum of configuration sizes over all rounds. Throws
/// LegalityError on an illegal trace.
CostReport cc(const PebblingTrace& trace);

/// Attack parameters: e and d are the standard depth-reduction bounds derived
/// from (eta, delta, n).
struct AttackParams {
  std::uint32_t eta = 2;
  std::uint64_t g = 0;  // 0: use the cost-optimal stride n / sqrt(k * 2^eta)

  static std::uint64_t e_bound(std::uint64_t n, std::uint32_t delta, std::uint32_t eta);
  static std::uint64_t d_bound(std::uint64_t n, std::uint32_t eta);
  static std::uint64_t default_stride(std::uint64_t n, std::uint32_t k, std::uint32_t eta);
};

/// Depth-reducing set via the edge-class argument: the class of edge (u, v) is
/// the most significant differing bit of u-1 and v-1; removing one endpoint
/// per edge of a feasible class subset bounds the surviving depth. Guarantees
/// |S| <= e_bound and depth(G - S) <= d_bound.
std::vector<NodeId> valiant_reduce(const Dag& g, std::uint32_t eta);

/// Lazy dynamic-edge resolver: r(v) becomes visible only after node v-1 has
/// been pebbled. Strategies must go through this; the checker enforces the
/// timing via the trace's resolution events.
class ResolverContext {
 public:
  ResolverContext(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material);

  /// Call when node u first receives a pebble; fixes r(u+1) if u+1 is dynamic
  /// and returns the resolution event to record on the trace.
  std::optional<ResolutionEvent> on_first_pebble(NodeId u, std::uint32_t round);

  bool revealed(NodeId v) const;
  NodeId resolve(NodeId v) const;  // throws if not yet revealed

 private:
  std::shared_ptr<const DynamicGraphSpec> spec_;
  Bytes material_;
  std::vector<std::optional<NodeId>> resolved_;
  std::vector<std::uint32_t> group_of_;
  std::vector<std::uint32_t> group_steps_;
};

struct AttackResult {
  PebblingTrace trace;
  CostReport report;
  std::uint64_t fallbacks = 0;  // windows that hit the full-repebble branch
  AttackParams params;
};

/// Algorithm-1-style generic attack: light phases pebble the next g nodes
/// while holding a depth-reducing set plus the window's potential parents;
/// balloon phases regenerate everything and refresh the kept sets; invariant
/// failure falls back to a full sequential repebble.
AttackResult generic_attack(std::shared_ptr<const DynamicGraphSpec> spec, AttackParams params,
                            Bytes resolver_material);

/// Constant-free reference value N*e + N*g*k + N^2*d/g from the attack's cost
/// analysis.
std::uint64_t attack_cost_bound(std::uint64_t n, std::uint32_t k, std::uint32_t delta, std::uint32_t eta,
                                std::uint64_t g);

/// Baseline strategies plus the generic attack over a small (eta, g) grid.
/// Known names: "keep-all", "greedy-discard", "generic-attack".
std::map<std::string, CostReport> strategy_suite(std::shared_ptr<const DynamicGraphSpec> spec,
                                                 const std::vector<std::string>& names, Bytes material);

AttackResult run_keep_all(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material);
AttackResult run_greedy_discard(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material);

struct DistributionReport {
  std::uint64_t quantile = 0;  // max c with Pr[cc >= c] >= 1 - delta, empirically
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double mean = 0;
  double delta = 0;
  std::uint32_t trials = 0;
  std::vector<std::uint64_t> samples;  // per-trial cc, trial order
};

/// Empirical cc distribution of a strategy over freshly resolved graphs.
DistributionReport cc_distribution(std::shared_ptr<const DynamicGraphSpec> spec, const std::string& strategy,
                                   std::uint32_t trials, double delta, Bytes material, std::uint32_t jobs = 1);

}  // namespace pebblemark
