#include "pebblemark/pebbling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <set>

#include "pebblemark/builders.hpp"

namespace pebblemark {

PebblingTrace::PebblingTrace(std::shared_ptr<const Dag> graph, PebblingMode mode)
    : graph_(std::move(graph)), mode_(mode) {
  if (!graph_) throw std::invalid_argument("PebblingTrace: null graph");
}

PebblingTrace::PebblingTrace(std::shared_ptr<const DynamicGraphSpec> spec, PebblingMode mode)
    : spec_(std::move(spec)), mode_(mode) {
  if (!spec_) throw std::invalid_argument("PebblingTrace: null spec");
}

std::uint32_t PebblingTrace::universe() const {
  return graph_ ? graph_->size() : spec_->total_nodes();
}

void PebblingTrace::concat(const PebblingTrace& tail) {
  if (mode_ != tail.mode_ || universe() != tail.universe()) {
    throw std::invalid_argument("concat: incompatible traces");
  }
  std::uint32_t offset = static_cast<std::uint32_t>(rounds_.size());
  for (const auto& r : tail.rounds_) rounds_.push_back(r);
  for (const auto& e : tail.resolutions_) {
    resolutions_.push_back(ResolutionEvent{e.node, e.parent, e.round + offset});
  }
}

// --- legality ----------------------------------------------------------------

namespace {

struct Replayer {
  const PebblingTrace& trace;
  std::vector<std::uint8_t> pebbled;
  std::vector<NodeId> dyn_parent;           // 0 = unresolved
  std::vector<std::uint32_t> first_pebbled; // 0 = never
  std::vector<std::uint32_t> removed_stamp; // per-node stamp of the round that removed it

  explicit Replayer(const PebblingTrace& t)
      : trace(t),
        pebbled(t.universe() + 1, 0),
        dyn_parent(t.universe() + 1, 0),
        first_pebbled(t.universe() + 1, 0),
        removed_stamp(t.universe() + 1, 0) {}
};

}  // namespace

LegalityReport check_legal_report(const PebblingTrace& trace) {
  Replayer rp(trace);
  const DynamicGraphSpec* spec = trace.dynamic_spec();
  const Dag* dag = trace.static_graph();
  auto fail = [](std::uint32_t round, const std::string& why) {
    return LegalityReport{false, "round " + std::to_string(round) + ": " + why};
  };

  // Resolution events indexed by round, replayed between rounds.
  std::size_t next_resolution = 0;
  const auto& resolutions = trace.resolutions();

  std::uint32_t n = trace.universe();
  std::uint32_t round = 0;
  for (const auto& r : trace.rounds()) {
    ++round;
    // Apply resolutions declared up to and including the previous round: an
    // edge fixed in round t is usable by placements from round t+1 onward.
    while (next_resolution < resolutions.size() && resolutions[next_resolution].round < round) {
      const auto& e = resolutions[next_resolution];
      if (!spec) return fail(round, "resolution event on a static trace");
      if (!spec->is_dynamic(e.node)) return fail(e.round, "resolution of non-dynamic node");
      const auto& pool = spec->potential_parents(e.node);
      if (!std::binary_search(pool.begin(), pool.end(), e.parent)) {
        return fail(e.round, "resolved parent outside the declared potential set");
      }
      // r(i) may not be chosen before node i-1 is pebbled.
      if (rp.first_pebbled[e.node - 1] == 0 || e.round < rp.first_pebbled[e.node - 1]) {
        return fail(e.round, "r(" + std::to_string(e.node) + ") fixed before node " +
                                 std::to_string(e.node - 1) + " was pebbled");
      }
      rp.dyn_parent[e.node] = e.parent;
      ++next_resolution;
    }

    if (trace.mode() == PebblingMode::Sequential && r.added.size() > 1) {
      return fail(round, "sequential trace places more than one pebble");
    }
    for (NodeId v : r.removed) {
      if (v < 1 || v > n) return fail(round, "removal outside universe");
      if (!rp.pebbled[v]) return fail(round, "removing absent pebble " + std::to_string(v));
      rp.removed_stamp[v] = round;
    }
    for (NodeId v : r.added) {
      if (v < 1 || v > n) return fail(round, "placement outside universe");
      if (rp.pebbled[v]) return fail(round, "placing pebble on occupied node " + std::to_string(v));
      if (rp.removed_stamp[v] == round) return fail(round, "node added and removed in one round");
      // Collect v's parents under the (partially resolved) graph.
      auto check_parent = [&](NodeId u) -> std::optional<LegalityReport> {
        if (!rp.pebbled[u]) {
          return fail(round, "parent " + std::to_string(u) + " of " + std::to_string(v) + " not pebbled");
        }
        if (rp.removed_stamp[u] == round) {
          return fail(round, "parent " + std::to_string(u) + " discarded in the round it is consumed");
        }
        return std::nullopt;
      };
      if (spec && spec->is_dynamic(v)) {
        if (rp.dyn_parent[v] == 0) {
          return fail(round, "placing dynamic node " + std::to_string(v) + " before r(v) is resolved");
        }
        if (auto bad = check_parent(v - 1)) return *bad;
        if (auto bad = check_parent(rp.dyn_parent[v])) return *bad;
      } else {
        const auto& ps = spec ? spec->base().parents(v) : dag->parents(v);
        for (NodeId u : ps) {
          if (auto bad = check_parent(u)) return *bad;
        }
      }
    }
    // Commit the round.
    for (NodeId v : r.removed) rp.pebbled[v] = 0;
    for (NodeId v : r.added) {
      rp.pebbled[v] = 1;
      if (rp.first_pebbled[v] == 0) rp.first_pebbled[v] = round;
    }
  }
  return LegalityReport{};
}

bool check_legal(const PebblingTrace& trace) { return check_legal_report(trace).ok; }

CostReport cc(const PebblingTrace& trace) {
  LegalityReport legal = check_legal_report(trace);
  if (!legal.ok) throw LegalityError("cc: illegal trace: " + legal.reason);
  CostReport report;
  std::uint64_t live = 0;
  for (const auto& r : trace.rounds()) {
    live += r.added.size();
    live -= r.removed.size();
    report.cc += live;
    ++report.rounds;
    switch (r.phase) {
      case PebblePhase::Light: report.light_cc += live; break;
      case PebblePhase::Balloon: report.balloon_cc += live; break;
      case PebblePhase::Repebble: report.repebble_cc += live; break;
    }
  }
  return report;
}

// --- Valiant-style depth reduction --------------------------------------------

namespace {

std::uint32_t bit_width_u32(std::uint32_t x) {
  std::uint32_t w = 0;
  while (x) {
    ++w;
    x >>= 1;
  }
  return w;
}

// Number of submasks y of `mask` (within `bits` bit positions) with y < n.
// Realizable projections of [0, n) onto the mask bits are exactly these.
std::uint64_t submask_count_below(std::uint32_t mask, std::uint32_t bits, std::uint64_t n) {
  if (n >= (1ull << bits)) return 1ull << std::popcount(mask);
  std::uint64_t count = 0;
  bool tight = true;
  for (int b = static_cast<int>(bits) - 1; b >= 0 && tight; --b) {
    std::uint32_t bit = 1u << b;
    bool nb = (n >> b) & 1;
    std::uint32_t lower_mask_bits = mask & (bit - 1);
    std::uint64_t free_below = 1ull << std::popcount(lower_mask_bits);
    if (mask & bit) {
      if (nb) {
        count += free_below;  // choose 0 here, anything below
        // stay tight with 1
      }
      // nb == 0: must choose 0 to stay <= prefix; stays tight
    } else {
      // y-bit forced to 0
      if (nb) {
        count += free_below;
        tight = false;
      }
      // nb == 0: stays tight
    }
  }
  return count;
}

struct ClassReduction {
  std::vector<NodeId> witness;      // one endpoint per edge of the chosen classes
  std::uint64_t chosen_edges = 0;
  bool found = false;
};

// Pick the cheapest set of edge classes whose removal provably bounds the
// surviving depth by d_cap, then return the head endpoints of those edges.
// parent_of(v) must yield the parent list of v for v in [1, n].
template <typename ParentsFn>
ClassReduction reduce_by_classes(std::uint32_t n, ParentsFn parent_of, std::uint64_t d_cap) {
  ClassReduction out;
  if (n == 0) {
    out.found = true;
    return out;
  }
  std::uint32_t bits = std::max<std::uint32_t>(bit_width_u32(n - 1), 1);
  std::vector<std::uint64_t> class_edges(bits, 0);
  for (NodeId v = 1; v <= n; ++v) {
    for (NodeId u : parent_of(v)) {
      std::uint32_t x = (u - 1) ^ (v - 1);
      class_edges[bit_width_u32(x) - 1] += 1;
    }
  }
  if (bits > 26) throw std::length_error("reduce_by_classes: graph too large for class enumeration");
  std::uint32_t full = (1u << bits) - 1;
  std::uint32_t best_mask = 0;
  std::uint64_t best_edges = UINT64_MAX;
  for (std::uint32_t t = 0; t <= full; ++t) {
    if (submask_count_below(full & ~t, bits, n) > d_cap) continue;
    std::uint64_t edges = 0;
    for (std::uint32_t b = 0; b < bits; ++b) {
      if (t & (1u << b)) edges += class_edges[b];
    }
    if (edges < best_edges) {
      best_edges = edges;
      best_mask = t;
    }
  }
  if (best_edges == UINT64_MAX) return out;
  out.found = true;
  out.chosen_edges = best_edges;
  std::vector<std::uint8_t> in_set(n + 1, 0);
  for (NodeId v = 1; v <= n; ++v) {
    for (NodeId u : parent_of(v)) {
      std::uint32_t x = (u - 1) ^ (v - 1);
      if (best_mask & (1u << (bit_width_u32(x) - 1))) in_set[v] = 1;
    }
  }
  for (NodeId v = 1; v <= n; ++v) {
    if (in_set[v]) out.witness.push_back(v);
  }
  return out;
}

}  // namespace

std::uint64_t AttackParams::e_bound(std::uint64_t n, std::uint32_t delta, std::uint32_t eta) {
  double lg = std::log2(static_cast<double>(n));
  double denom = lg - static_cast<double>(eta);
  if (denom <= 0) throw std::out_of_range("eta must be below log2(n)");
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(eta) * delta * n / denom));
}

std::uint64_t AttackParams::d_bound(std::uint64_t n, std::uint32_t eta) {
  std::uint64_t pow = 1ull << eta;
  return (n + pow - 1) / pow;
}

std::uint64_t AttackParams::default_stride(std::uint64_t n, std::uint32_t k, std::uint32_t eta) {
  double g = static_cast<double>(n) / std::sqrt(static_cast<double>(k) * std::pow(2.0, eta));
  std::uint64_t out = static_cast<std::uint64_t>(std::llround(g));
  return std::clamp<std::uint64_t>(out, 1, n);
}

std::vector<NodeId> valiant_reduce(const Dag& g, std::uint32_t eta) {
  std::uint32_t n = g.size();
  if (n <= 1) return {};
  if (eta < 1 || static_cast<double>(eta) >= std::log2(static_cast<double>(n))) {
    throw std::out_of_range("valiant_reduce: need 1 <= eta < log2(n)");
  }
  std::uint64_t d = AttackParams::d_bound(n, eta);
  std::uint64_t e = AttackParams::e_bound(n, g.indeg_bound(), eta);
  auto reduction = reduce_by_classes(n, [&g](NodeId v) -> const std::vector<NodeId>& { return g.parents(v); }, d);
  if (!reduction.found) throw std::runtime_error("valiant_reduce: no feasible class subset");
  if (reduction.witness.size() > e) {
    throw std::runtime_error("valiant_reduce: witness exceeds the size bound (|S|=" +
                             std::to_string(reduction.witness.size()) + ", e=" + std::to_string(e) + ")");
  }
  return reduction.witness;
}

// --- resolver context ----------------------------------------------------------

ResolverContext::ResolverContext(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material)
    : spec_(std::move(spec)), material_(std::move(material)) {
  resolved_.assign(spec_->dynamic_nodes(), std::nullopt);
  if (spec_->resolver() == ResolverKind::KeyedDistinct) {
    SuffixGroups groups = derive_suffix_groups(*spec_);
    group_of_ = groups.group_of;
    group_steps_.assign(groups.n_groups, 0);
  }
}

std::optional<ResolutionEvent> ResolverContext::on_first_pebble(NodeId u, std::uint32_t round) {
  NodeId v = u + 1;
  if (!spec_->is_dynamic(v)) return std::nullopt;
  std::uint32_t t = v - spec_->prefix_nodes();  // 1-based dynamic ordinal
  if (resolved_[t - 1]) return std::nullopt;
  const auto& pool = spec_->potential_parents(v);
  NodeId parent;
  if (spec_->resolver() == ResolverKind::Uniform) {
    SeededRng rng(derive_seed(material_, "resolve", v));
    parent = pool[rng.below(pool.size())];
  } else {
    std::uint32_t gid = group_of_[t - 1];
    std::vector<std::uint32_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    SeededRng rng(derive_seed(material_, "keyed-block", gid - 1));
    for (std::uint32_t i = static_cast<std::uint32_t>(idx.size()) - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.below(i + 1)]);
    }
    std::uint32_t step = group_steps_[gid - 1]++;
    if (step >= pool.size()) throw std::logic_error("keyed resolver exhausted its block");
    parent = pool[idx[step]];
  }
  resolved_[t - 1] = parent;
  return ResolutionEvent{v, parent, round};
}

bool ResolverContext::revealed(NodeId v) const {
  if (!spec_->is_dynamic(v)) return true;
  return resolved_[v - spec_->prefix_nodes() - 1].has_value();
}

NodeId ResolverContext::resolve(NodeId v) const {
  if (!spec_->is_dynamic(v)) throw std::out_of_range("resolve: node is not dynamic");
  const auto& slot = resolved_[v - spec_->prefix_nodes() - 1];
  if (!slot) throw std::logic_error("resolve: r(" + std::to_string(v) + ") not yet revealed");
  return *slot;
}

// --- strategy driver machinery ---------------------------------------------------

namespace {

// Shared mutable state for strategies: pebble set, revealed adjacency, cost.
struct Driver {
  std::shared_ptr<const DynamicGraphSpec> spec;
  ResolverContext ctx;
  PebblingTrace trace;
  std::vector<std::uint8_t> pebbled;
  std::vector<std::uint32_t> first_round;
  // Parents of every node under the revealed graph; dynamic rows get filled
  // when their edge resolves.
  std::vector<std::vector<NodeId>> parents;
  std::uint64_t live = 0;
  std::uint32_t round = 0;

  Driver(std::shared_ptr<const DynamicGraphSpec> s, Bytes material, PebblingMode mode)
      : spec(s), ctx(s, std::move(material)), trace(s, mode) {
    std::uint32_t n = spec->total_nodes();
    pebbled.assign(n + 1, 0);
    first_round.assign(n + 1, 0);
    parents.resize(n);
    for (NodeId v = 1; v <= spec->prefix_nodes(); ++v) parents[v - 1] = spec->base().parents(v);
  }

  std::uint32_t total() const { return spec->total_nodes(); }

  void apply(TraceRound r) {
    ++round;
    for (NodeId v : r.removed) {
      pebbled[v] = 0;
      --live;
    }
    for (NodeId v : r.added) {
      pebbled[v] = 1;
      ++live;
      if (first_round[v] == 0) {
        first_round[v] = round;
        if (auto ev = ctx.on_first_pebble(v, round)) {
          parents[ev->node - 1] = {ev->parent, ev->node - 1};
          std::sort(parents[ev->node - 1].begin(), parents[ev->node - 1].end());
          trace.record_resolution(ev->node, ev->parent, ev->round);
        }
      }
    }
    trace.push_round(std::move(r));
  }
};

// Longest path (in nodes) of the revealed prefix [1, hi] minus the pebbled
// set; early-exits once the bound is exceeded.
bool depth_within(const Driver& d, std::uint32_t hi, std::uint64_t bound) {
  std::vector<std::uint32_t> len(hi + 1, 0);
  for (NodeId v = 1; v <= hi; ++v) {
    if (d.pebbled[v]) continue;
    std::uint32_t best = 1;
    for (NodeId u : d.parents[v - 1]) {
      if (u <= hi && !d.pebbled[u] && len[u] + 1 > best) best = len[u] + 1;
    }
    len[v] = best;
    if (best > bound) return false;
  }
  return true;
}

}  // namespace

AttackResult generic_attack(std::shared_ptr<const DynamicGraphSpec> spec, AttackParams params,
                            Bytes resolver_material) {
  std::uint32_t n = spec->total_nodes();
  if (n == 0) throw std::invalid_argument("generic_attack: empty graph");
  if (params.eta < 1 || (n > 1 && static_cast<double>(params.eta) >= std::log2(static_cast<double>(n)))) {
    throw std::out_of_range("generic_attack: need 1 <= eta < log2(n)");
  }
  std::uint64_t g = params.g ? params.g : AttackParams::default_stride(n, std::max(1u, spec->k()), params.eta);
  g = std::clamp<std::uint64_t>(g, 1, n);
  params.g = g;
  std::uint64_t d = AttackParams::d_bound(n, params.eta);

  Driver drv(spec, std::move(resolver_material), PebblingMode::Parallel);
  std::uint64_t fallbacks = 0;

  auto fallback = [&](std::uint32_t upto) {
    // Full sequential repebble 1..upto, keeping everything.
    ++fallbacks;
    for (NodeId j = 1; j <= upto; ++j) {
      TraceRound r;
      r.phase = PebblePhase::Repebble;
      if (!drv.pebbled[j]) r.added.push_back(j);
      drv.apply(std::move(r));
    }
  };

  // Potential parents of the window [lo, hi] that live strictly before lo.
  auto window_parents_before = [&](NodeId lo, NodeId hi) {
    std::vector<NodeId> out;
    for (NodeId u = lo; u <= hi; ++u) {
      for (NodeId p : spec->all_potential_parents(u)) {
        if (p < lo) out.push_back(p);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::uint64_t w = 0;
  while (w < n) {
    std::uint64_t wend = std::min<std::uint64_t>(w + g, n);

    if (!depth_within(drv, static_cast<std::uint32_t>(w), d)) {
      // Invariant violated at the window boundary: Alg. 1's total fallback.
      fallback(static_cast<std::uint32_t>(w) + 1);
    } else if (w > 0) {
      // Balloon phase: frontier expansion until the whole revealed prefix is
      // pebbled, then discard down to the working set.
      std::vector<std::uint32_t> missing(w + 1, 0);
      std::vector<NodeId> frontier;
      for (NodeId v = 1; v <= w; ++v) {
        if (drv.pebbled[v]) continue;
        std::uint32_t cnt = 0;
        for (NodeId u : drv.parents[v - 1]) {
          if (!drv.pebbled[u]) ++cnt;
        }
        missing[v] = cnt;
        if (cnt == 0) frontier.push_back(v);
      }
      // Children lists within the prefix, for counter updates.
      std::vector<std::vector<NodeId>> kids(w + 1);
      for (NodeId v = 1; v <= w; ++v) {
        if (drv.pebbled[v]) continue;
        for (NodeId u : drv.parents[v - 1]) {
          if (!drv.pebbled[u]) kids[u].push_back(v);
        }
      }
      while (!frontier.empty()) {
        TraceRound r;
        r.phase = PebblePhase::Balloon;
        r.added = frontier;
        std::vector<NodeId> next;
        for (NodeId v : frontier) {
          for (NodeId c : kids[v]) {
            if (--missing[c] == 0) next.push_back(c);
          }
        }
        drv.apply(std::move(r));
        frontier = std::move(next);
      }

      // Refresh the depth-reducing set over the revealed prefix.
      auto reduction = reduce_by_classes(
          static_cast<std::uint32_t>(w),
          [&](NodeId v) -> const std::vector<NodeId>& { return drv.parents[v - 1]; }, d);
      std::vector<std::uint8_t> keep(w + 1, 0);
      keep[w] = 1;
      for (NodeId v : reduction.witness) keep[v] = 1;
      for (NodeId p : window_parents_before(static_cast<NodeId>(w) + 1, static_cast<NodeId>(wend))) {
        if (p <= w) keep[p] = 1;
      }
      TraceRound discard;
      discard.phase = PebblePhase::Balloon;
      for (NodeId v = 1; v <= w; ++v) {
        if (drv.pebbled[v] && !keep[v]) discard.removed.push_back(v);
      }
      if (!discard.removed.empty()) drv.apply(std::move(discard));
    }

    // Light phase: walk the window one node per round.
    for (NodeId v = static_cast<NodeId>(w) + 1; v <= wend; ++v) {
      if (drv.pebbled[v]) continue;  // possible after a fallback
      bool ready = true;
      for (NodeId p : drv.parents[v - 1]) {
        if (!drv.pebbled[p]) {
          ready = false;
          break;
        }
      }
      if (spec->is_dynamic(v) && !drv.ctx.revealed(v)) ready = false;
      if (!ready) fallback(v);
      if (!drv.pebbled[v]) {
        TraceRound r;
        r.phase = PebblePhase::Light;
        r.added.push_back(v);
        drv.apply(std::move(r));
      }
    }
    w = wend;
  }

  AttackResult result{std::move(drv.trace), CostReport{}, fallbacks, params};
  result.report = cc(result.trace);
  return result;
}

std::uint64_t attack_cost_bound(std::uint64_t n, std::uint32_t k, std::uint32_t delta, std::uint32_t eta,
                                std::uint64_t g) {
  if (n == 0 || k == 0 || delta == 0 || g == 0) throw std::out_of_range("attack_cost_bound: positive arguments");
  std::uint64_t e = AttackParams::e_bound(n, delta, eta);
  std::uint64_t d = AttackParams::d_bound(n, eta);
  unsigned __int128 total = static_cast<unsigned __int128>(n) * e;
  total += static_cast<unsigned __int128>(n) * g * k;
  total += static_cast<unsigned __int128>(n) * n * d / g;
  if (total > UINT64_MAX) throw std::overflow_error("attack_cost_bound: overflow");
  return static_cast<std::uint64_t>(total);
}

// --- baseline strategies ----------------------------------------------------------

AttackResult run_keep_all(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material) {
  Driver drv(spec, std::move(material), PebblingMode::Sequential);
  for (NodeId v = 1; v <= drv.total(); ++v) {
    TraceRound r;
    r.added.push_back(v);
    drv.apply(std::move(r));
  }
  AttackResult out{std::move(drv.trace), CostReport{}, 0, AttackParams{}};
  out.report = cc(out.trace);
  return out;
}

AttackResult run_greedy_discard(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material) {
  Driver drv(spec, std::move(material), PebblingMode::Sequential);
  std::uint32_t n = drv.total();

  // Future-need accounting over the potential graph: a pebble stays while it
  // might still be consumed.
  std::vector<std::uint32_t> need(n + 1, 0);
  for (NodeId v = 1; v <= spec->prefix_nodes(); ++v) {
    for (NodeId u : spec->base().parents(v)) ++need[u];
  }
  for (NodeId v = spec->prefix_nodes() + 1; v <= n; ++v) {
    ++need[v - 1];
    for (NodeId u : spec->potential_parents(v)) ++need[u];
  }
  ++need[n];  // the target keeps its pebble

  std::set<NodeId> pending;  // zero-need pebbled nodes awaiting discard
  for (NodeId v = 1; v <= n; ++v) {
    TraceRound r;
    r.added.push_back(v);
    // Release the needs v was holding against its (potential) parents.
    std::vector<NodeId> released;
    if (spec->is_dynamic(v)) {
      released.push_back(v - 1);
      for (NodeId u : spec->potential_parents(v)) released.push_back(u);
    } else {
      for (NodeId u : spec->base().parents(v)) released.push_back(u);
    }
    std::vector<NodeId> used = drv.parents[v - 1];  // actual parents consumed this round
    for (NodeId u : released) {
      if (--need[u] == 0 && drv.pebbled[u]) pending.insert(u);
    }
    for (NodeId u : pending) {
      if (std::find(used.begin(), used.end(), u) == used.end()) r.removed.push_back(u);
    }
    for (NodeId u : r.removed) pending.erase(u);
    drv.apply(std::move(r));
    if (need[v] == 0) pending.insert(v);
  }
  AttackResult out{std::move(drv.trace), CostReport{}, 0, AttackParams{}};
  out.report = cc(out.trace);
  return out;
}

namespace {

AttackResult best_generic_attack(std::shared_ptr<const DynamicGraphSpec> spec, Bytes material) {
  std::uint32_t n = spec->total_nodes();
  std::optional<AttackResult> best;
  for (std::uint32_t eta = 1; eta <= 3; ++eta) {
    if (static_cast<double>(eta) >= std::log2(static_cast<double>(n))) break;
    std::uint64_t g0 = AttackParams::default_stride(n, std::max(1u, spec->k()), eta);
    for (std::uint64_t g : {g0, std::max<std::uint64_t>(1, g0 / 2), std::min<std::uint64_t>(n, g0 * 2)}) {
      AttackParams params;
      params.eta = eta;
      params.g = g;
      AttackResult res = generic_attack(spec, params, material);
      if (!best || res.report.cc < best->report.cc) best = std::move(res);
    }
  }
  if (!best) throw std::invalid_argument("generic attack needs log2(n) > 1");
  return std::move(*best);
}

AttackResult run_named_strategy(const std::string& name, std::shared_ptr<const DynamicGraphSpec> spec,
                                Bytes material) {
  if (name == "keep-all") return run_keep_all(spec, std::move(material));
  if (name == "greedy-discard") return run_greedy_discard(spec, std::move(material));
  if (name == "generic-attack") return best_generic_attack(spec, std::move(material));
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

}  // namespace

std::map<std::string, CostReport> strategy_suite(std::shared_ptr<const DynamicGraphSpec> spec,
                                                 const std::vector<std::string>& names, Bytes material) {
  std::map<std::string, CostReport> out;
  for (const auto& name : names) {
    out[name] = run_named_strategy(name, spec, material).report;
  }
  return out;
}

DistributionReport cc_distribution(std::shared_ptr<const DynamicGraphSpec> spec, const std::string& strategy,
                                   std::uint32_t trials, double delta, Bytes material, std::uint32_t jobs) {
  if (trials < 1) throw std::out_of_range("cc_distribution: trials >= 1");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::out_of_range("cc_distribution: delta in [0, 1)");
  DistributionReport report;
  report.trials = trials;
  report.delta = delta;
  report.samples.assign(trials, 0);

  auto run_trial = [&](std::uint32_t t) {
    Bytes trial_material = derive_seed(material, "trial", t);
    report.samples[t] = run_named_strategy(strategy, spec, std::move(trial_material)).report.cc;
  };
  if (jobs <= 1) {
    for (std::uint32_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<std::uint32_t> next{0};
    for (std::uint32_t j = 0; j < jobs; ++j) {
      futures.push_back(std::async(std::launch::async, [&]() {
        while (true) {
          std::uint32_t t = next.fetch_add(1);
          if (t >= trials) return;
          run_trial(t);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  std::vector<std::uint64_t> sorted = report.samples;
  std::sort(sorted.begin(), sorted.end());
  report.min = sorted.front();
  report.max = sorted.back();
  report.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / trials;
  std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(delta * trials), trials - 1);
  report.quantile = sorted[idx];
  return report;
}

}  // namespace pebblemark
