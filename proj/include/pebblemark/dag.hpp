#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pebblemark/hashing.hpp"

namespace pebblemark {

/// Node ids are 1-based and topological: every edge (u, v) has u < v.
using NodeId = std::uint32_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable DAG in topological order. Parent lists are sorted ascending and
/// node 1 never has parents. `indeg_bound` is the declared bound delta, kept
/// separate from the observed maximum so attack-parameter formulas use the
/// family's bound rather than one sample's.
class Dag {
 public:
  Dag() = default;
  Dag(std::uint32_t n, std::vector<std::vector<NodeId>> parents, std::uint32_t indeg_bound);

  static Dag line(std::uint32_t n);

  std::uint32_t size() const { return n_; }
  std::uint32_t indeg_bound() const { return indeg_bound_; }

  const std::vector<NodeId>& parents(NodeId v) const {
    check_node(v);
    return parents_[v - 1];
  }

  /// Children adjacency (computed on demand, cached).
  std::vector<std::vector<NodeId>> children() const;

  std::uint64_t edge_count() const;

  bool operator==(const Dag& other) const {
    return n_ == other.n_ && indeg_bound_ == other.indeg_bound_ && parents_ == other.parents_;
  }

  void check_node(NodeId v) const {
    if (v < 1 || v > n_) {
      throw std::out_of_range("node " + std::to_string(v) + " outside [1, " + std::to_string(n_) + "]");
    }
  }

 private:
  std::uint32_t n_ = 0;
  std::uint32_t indeg_bound_ = 0;
  std::vector<std::vector<NodeId>> parents_;
};

/// All ancestors of the nodes in `vs` (excluding vs itself unless reachable).
std::vector<NodeId> ancestors(const Dag& g, std::span<const NodeId> vs);

/// Number of nodes on the longest directed path; 0 for the empty graph.
std::uint32_t depth(const Dag& g);

struct RemoveResult {
  Dag dag;
  /// old_to_new[v-1] == 0 for removed nodes, else the surviving node's new id.
  std::vector<NodeId> old_to_new;
  std::vector<NodeId> new_to_old;
};

/// Induced subgraph on V \ s, original relative order preserved.
RemoveResult remove(const Dag& g, std::span<const NodeId> s);

/// Subgraph induced by [1, i].
Dag prefix(const Dag& g, NodeId i);

/// True iff removing s leaves depth(G - s) <= d.
bool check_reducibility_witness(const Dag& g, std::span<const NodeId> s, std::uint32_t d);

/// How a dynamic spec's data-dependent parents get fixed.
enum class ResolverKind {
  /// r(i) drawn uniformly from R_i, seeded, independent of any labels.
  Uniform,
  /// r(i) = block base + perm(key ∘ block, step): a keyed permutation walk
  /// guaranteeing pairwise-distinct parents per block (the collision-resistant
  /// extension's rule, keyed by input material).
  KeyedDistinct,
};

/// Static prefix plus a k-restricted dynamic suffix. Dynamic node i always has
/// the path parent i-1; its second parent r(i) is confined to potential[i -
/// prefix_n - 1] and is only fixed when a resolver context is asked.
class DynamicGraphSpec {
 public:
  DynamicGraphSpec() = default;
  DynamicGraphSpec(Dag base, std::vector<std::vector<NodeId>> potential, std::uint32_t k,
                   ResolverKind resolver = ResolverKind::Uniform);

  std::uint32_t total_nodes() const { return static_cast<std::uint32_t>(base_.size() + potential_.size()); }
  std::uint32_t prefix_nodes() const { return base_.size(); }
  std::uint32_t dynamic_nodes() const { return static_cast<std::uint32_t>(potential_.size()); }
  std::uint32_t k() const { return k_; }
  ResolverKind resolver() const { return resolver_; }
  void set_resolver(ResolverKind r) { resolver_ = r; }

  const Dag& base() const { return base_; }

  bool is_dynamic(NodeId v) const { return v > base_.size() && v <= total_nodes(); }

  /// Potential parents R_v of a dynamic node (ascending). The path parent v-1
  /// is implicit and not part of R_v.
  const std::vector<NodeId>& potential_parents(NodeId v) const;

  /// Union of {v-1} ∪ R_v for dynamic v, or the static parents for prefix
  /// nodes; this is what an attacker must hold to pebble v next.
  std::vector<NodeId> all_potential_parents(NodeId v) const;

  /// Max declared indegree of the whole (resolved) graph.
  std::uint32_t indeg_bound() const { return std::max<std::uint32_t>(base_.indeg_bound(), 2); }

  bool operator==(const DynamicGraphSpec& other) const {
    return base_ == other.base_ && potential_ == other.potential_ && k_ == other.k_;
  }

 private:
  Dag base_;
  std::vector<std::vector<NodeId>> potential_;
  std::uint32_t k_ = 0;
  ResolverKind resolver_ = ResolverKind::Uniform;
};

/// A spec with every r(i) fixed, plus where the choices came from.
struct ResolvedDynamicGraph {
  Dag dag;
  std::vector<NodeId> resolved;  // resolved[t] = r(prefix_n + 1 + t)
  std::string provenance;        // human-readable: input / key / seed material
};

/// Fix every dynamic parent using the spec's resolver kind and the given
/// key/seed material (bulk, data-independent path; pebbling uses the lazy
/// per-node interface in pebbling.hpp instead).
ResolvedDynamicGraph resolve_all(const DynamicGraphSpec& spec, std::span<const std::uint8_t> material);

// Text format (External Interfaces):
//   dag <n> <indeg_bound>      |  dyn <n> <k> <static_prefix_len>
//   "<v>: p1 p2 ..."           per static node
//   "<v> ? r1 r2 ... rk"       per dynamic node
std::string serialize(const Dag& g);
std::string serialize(const DynamicGraphSpec& spec);
Dag parse_dag(const std::string& text);
DynamicGraphSpec parse_dynamic_spec(const std::string& text);

/// Either form, dispatched on the header word.
struct ParsedGraph {
  std::optional<Dag> dag;
  std::optional<DynamicGraphSpec> spec;
};
ParsedGraph parse_graph(const std::string& text);

/// SHA-256 of the canonical serialization; manifests key graphs by this.
std::string graph_hash(const Dag& g);
std::string graph_hash(const DynamicGraphSpec& spec);

}  // namespace pebblemark
