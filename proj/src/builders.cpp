#include "pebblemark/builders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "pebblemark/pebbling.hpp"

namespace pebblemark {

std::vector<NodeId> IoDag::input_ids() const {
  std::vector<NodeId> out(inputs);
  for (std::uint32_t i = 0; i < inputs; ++i) out[i] = i + 1;
  return out;
}

std::vector<NodeId> IoDag::output_ids() const {
  std::vector<NodeId> out(outputs);
  for (std::uint32_t i = 0; i < outputs; ++i) out[i] = dag.size() - outputs + i + 1;
  return out;
}

Dag line_graph(std::uint32_t n) { return Dag::line(n); }

namespace {

bool is_pow2(std::uint32_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::uint32_t max_indeg(const std::vector<std::vector<NodeId>>& parents) {
  std::size_t best = 0;
  for (const auto& ps : parents) best = std::max(best, ps.size());
  return static_cast<std::uint32_t>(best);
}

Dag make_dag(std::vector<std::vector<NodeId>> parents) {
  std::uint32_t n = static_cast<std::uint32_t>(parents.size());
  for (auto& ps : parents) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }
  std::uint32_t bound = std::max<std::uint32_t>(max_indeg(parents), 1);
  return Dag(n, std::move(parents), bound);
}

}  // namespace

DepthRobustStack depth_robust_stack(std::uint32_t n, double epsilon, std::span<const std::uint8_t> seed) {
  if (n < 2) throw std::out_of_range("depth_robust_stack: n must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::out_of_range("depth_robust_stack: epsilon in (0,1)");
  std::uint32_t layers = static_cast<std::uint32_t>(std::ceil(1.0 / epsilon));
  SeededRng rng(derive_seed(seed, "drstack"));
  std::vector<std::vector<NodeId>> parents(static_cast<std::size_t>(layers) * n);
  auto id = [n](std::uint32_t layer, std::uint32_t w) { return static_cast<NodeId>(layer * n + w + 1); };
  for (std::uint32_t layer = 0; layer < layers; ++layer) {
    for (std::uint32_t w = 0; w < n; ++w) {
      auto& ps = parents[id(layer, w) - 1];
      if (w > 0) ps.push_back(id(layer, w - 1));
      if (layer > 0) {
        // two cross edges from the previous layer
        for (int c = 0; c < 2; ++c) ps.push_back(id(layer - 1, static_cast<std::uint32_t>(rng.below(n))));
      }
    }
  }
  DepthRobustStack out;
  out.graph = IoDag{make_dag(std::move(parents)), n, n};
  out.profile = audit_depth_robust(out.graph.dag, n, epsilon);
  return out;
}

DepthRobustProfile audit_depth_robust(const Dag& g, std::uint32_t n, double epsilon) {
  DepthRobustProfile prof;
  prof.epsilon = epsilon;
  double thresh = std::pow(static_cast<double>(n), 1.0 - epsilon) / 4.0;
  prof.d_target = static_cast<std::uint32_t>(std::ceil(thresh));
  double max_failed_frac = 0.0;
  double min_cert_frac = 1.0;
  double min_robust_depth = static_cast<double>(depth(g));
  bool any_cert = false;
  std::uint32_t log2n = 0;
  while ((1u << (log2n + 1)) <= g.size()) ++log2n;
  for (std::uint32_t eta = 1; eta <= std::min<std::uint32_t>(6, log2n ? log2n - 1 : 0); ++eta) {
    std::vector<NodeId> s;
    try {
      s = valiant_reduce(g, eta);
    } catch (const std::exception&) {
      continue;
    }
    double frac = static_cast<double>(s.size()) / n;
    std::uint32_t dep = depth(remove(g, s).dag);
    if (static_cast<double>(dep) < thresh) {
      any_cert = true;
      min_cert_frac = std::min(min_cert_frac, frac);
    } else {
      max_failed_frac = std::max(max_failed_frac, frac);
      min_robust_depth = std::min(min_robust_depth, static_cast<double>(dep));
    }
  }
  if (any_cert) {
    prof.downgraded = true;
    prof.gamma = std::min(max_failed_frac, min_cert_frac / 2.0);
  } else {
    prof.gamma = max_failed_frac;
  }
  prof.gamma = std::clamp(prof.gamma, 1.0 / n, 0.95);
  prof.c = std::clamp(min_robust_depth / std::pow(static_cast<double>(n), 1.0 - epsilon), prof.gamma, 0.99);
  prof.e_target = prof.gamma;
  return prof;
}

// --- superconcentrator ------------------------------------------------------

namespace {

// Benes stage strides, outermost first.
void benes_strides(std::uint32_t m, std::vector<std::uint32_t>& out) {
  if (m == 2) {
    out.push_back(1);
    return;
  }
  out.push_back(m / 2);
  benes_strides(m / 2, out);
  out.push_back(m / 2);
}

IoDag benes_wire_graph(std::uint32_t m, const std::vector<std::uint32_t>& strides) {
  std::uint32_t levels = static_cast<std::uint32_t>(strides.size()) + 1;
  std::vector<std::vector<NodeId>> parents(static_cast<std::size_t>(levels) * m);
  auto id = [m](std::uint32_t level, std::uint32_t w) { return static_cast<NodeId>(level * m + w + 1); };
  for (std::uint32_t st = 0; st < strides.size(); ++st) {
    std::uint32_t s = strides[st];
    for (std::uint32_t w = 0; w < m; ++w) {
      auto& ps = parents[id(st + 1, w) - 1];
      ps.push_back(id(st, w));
      ps.push_back(id(st, w ^ s));
    }
  }
  return IoDag{make_dag(std::move(parents)), m, m};
}

}  // namespace

IoDag superconcentrator(std::uint32_t n, ScFlavor flavor) {
  if (n < 2 || !is_pow2(n)) throw std::out_of_range("superconcentrator: n must be a power of two >= 2");
  std::vector<std::uint32_t> strides;
  if (flavor == ScFlavor::Recursive) {
    benes_strides(n, strides);
  } else {
    for (std::uint32_t s = n / 2; s >= 1; s /= 2) strides.push_back(s);
    for (std::uint32_t s = 2; s <= n / 2; s *= 2) strides.push_back(s);
  }
  return benes_wire_graph(n, strides);
}

// --- overlays ---------------------------------------------------------------

IoDag overlay(const Dag& g1, const IoDag& h, const Dag& g2) {
  if (h.inputs != g1.size()) throw std::invalid_argument("overlay: h source count != g1 size");
  if (h.outputs != g2.size()) throw std::invalid_argument("overlay: h sink count != g2 size");
  std::uint32_t n = h.dag.size();
  std::uint32_t shift = n - h.outputs;
  std::vector<std::vector<NodeId>> parents(n);
  for (NodeId v = 1; v <= n; ++v) parents[v - 1] = h.dag.parents(v);
  for (NodeId v = 1; v <= g1.size(); ++v) {
    for (NodeId u : g1.parents(v)) parents[v - 1].push_back(u);
  }
  for (NodeId v = 1; v <= g2.size(); ++v) {
    for (NodeId u : g2.parents(v)) parents[v + shift - 1].push_back(u + shift);
  }
  return IoDag{make_dag(std::move(parents)), h.inputs, h.outputs};
}

IoDag glue_onto_outputs(const IoDag& base, const IoDag& gadget) {
  if (base.outputs != gadget.inputs) {
    throw std::invalid_argument("glue_onto_outputs: base output count != gadget input count");
  }
  std::uint32_t bn = base.dag.size();
  std::uint32_t m = gadget.inputs;
  std::uint32_t added = gadget.dag.size() - m;
  auto remap = [&](NodeId u) -> NodeId { return u <= m ? bn - m + u : bn + (u - m); };
  std::vector<std::vector<NodeId>> parents(bn + added);
  for (NodeId v = 1; v <= bn; ++v) parents[v - 1] = base.dag.parents(v);
  for (NodeId v = 1; v <= gadget.dag.size(); ++v) {
    NodeId nv = remap(v);
    for (NodeId u : gadget.dag.parents(v)) parents[nv - 1].push_back(remap(u));
  }
  return IoDag{make_dag(std::move(parents)), base.inputs, gadget.outputs};
}

namespace {

// Put line-graph edges on the designated outputs (the L_N half of the paper's
// overlay definition).
IoDag with_line_on_outputs(IoDag io) {
  std::uint32_t n = io.dag.size();
  std::vector<std::vector<NodeId>> parents(n);
  for (NodeId v = 1; v <= n; ++v) parents[v - 1] = io.dag.parents(v);
  for (NodeId v = n - io.outputs + 2; v <= n; ++v) parents[v - 1].push_back(v - 1);
  io.dag = make_dag(std::move(parents));
  return io;
}

}  // namespace

IoDag superconc_overlay(const IoDag& g, ScFlavor flavor) {
  if (g.outputs == 0) throw std::invalid_argument("superconc_overlay: graph has no designated outputs");
  IoDag sc = superconcentrator(g.outputs, flavor);
  return with_line_on_outputs(glue_onto_outputs(g, sc));
}

IoDag grates_overlay(const IoDag& g, double epsilon, std::span<const std::uint8_t> seed) {
  if (g.outputs == 0) throw std::invalid_argument("grates_overlay: graph has no designated outputs");
  DepthRobustStack stack = depth_robust_stack(g.outputs, epsilon, seed);
  return with_line_on_outputs(glue_onto_outputs(g, stack.graph));
}

// --- block partitions --------------------------------------------------------

namespace {

BlockPartitionResult partition_impl(const IoDag& g, std::uint32_t n_dynamic, std::uint32_t block_size,
                                    std::uint32_t n_blocks, std::uint32_t spec_k, ResolverKind kind) {
  std::uint32_t total = g.dag.size();
  BlockLayout layout;
  layout.n_blocks = n_blocks;
  layout.block_size = block_size;
  NodeId first_output = total - n_blocks * block_size + 1;
  for (std::uint32_t j = 0; j < n_blocks; ++j) layout.offsets.push_back(first_output + j * block_size);

  std::vector<std::vector<NodeId>> potential(n_dynamic);
  for (std::uint32_t t = 1; t <= n_dynamic; ++t) {
    NodeId v = total + t;
    std::uint32_t j = (t - 1) % n_blocks;  // round-robin block
    auto& r = potential[t - 1];
    for (std::uint32_t p = 0; p < block_size; ++p) {
      NodeId u = layout.offsets[j] + p;
      // The model requires r(i) < i-1; only the degenerate single-block case
      // can collide with the path parent.
      if (u + 1 < v) r.push_back(u);
    }
    if (r.empty()) throw std::invalid_argument("block partition: empty restricted set (n too small)");
  }
  DynamicGraphSpec spec(g.dag, std::move(potential), spec_k, kind);
  return BlockPartitionResult{std::move(spec), std::move(layout)};
}

}  // namespace

BlockPartitionResult block_partition(const IoDag& g, std::uint32_t k, std::span<const std::uint8_t> seed) {
  (void)seed;  // resolution material is supplied per run; the structure is seed-free
  std::uint32_t n = g.outputs;
  if (k == 0 || n == 0 || n % k != 0) throw std::invalid_argument("block_partition: k must divide the output count");
  return partition_impl(g, n, k, n / k, k, ResolverKind::Uniform);
}

BlockPartitionResult cr_block_partition(const IoDag& g, std::uint32_t k) {
  if (g.outputs == 0 || g.outputs % 2 != 0) {
    throw std::invalid_argument("cr_block_partition: needs 2N designated outputs");
  }
  std::uint32_t n = g.outputs / 2;
  if (k == 0 || n % k != 0) throw std::invalid_argument("cr_block_partition: k must divide N");
  return partition_impl(g, n, 2 * k, n / k, 2 * k, ResolverKind::KeyedDistinct);
}

// --- samplers ----------------------------------------------------------------

namespace {

SampledConstruction sample_impl(std::uint32_t n, double epsilon, std::uint32_t k,
                                std::span<const std::uint8_t> seed, bool collision_resistant) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::out_of_range("sampler: epsilon in (0,1)");
  if (k == 0 || n == 0 || n % k != 0) throw std::invalid_argument("sampler: k must divide n");
  std::uint32_t width = collision_resistant ? 2 * n : n;
  if (!is_pow2(width)) throw std::out_of_range("sampler: interface width must be a power of two");
  DepthRobustStack g1 = depth_robust_stack(width, epsilon, derive_seed(seed, "g1"));
  IoDag g2 = superconc_overlay(g1.graph);
  IoDag g3 = grates_overlay(g2, epsilon, derive_seed(seed, "g3"));
  BlockPartitionResult bp = collision_resistant ? cr_block_partition(g3, k)
                                                : block_partition(g3, k, derive_seed(seed, "bp"));
  SampledConstruction out;
  out.n = n;
  if (g3.dag.size() % n != 0) throw std::logic_error("sampler: prefix size not a multiple of n");
  out.alpha = g3.dag.size() / n;
  out.spec = std::move(bp.spec);
  out.layout = std::move(bp.layout);
  out.grates_profile = g1.profile;
  return out;
}

}  // namespace

SampledConstruction sample_fig4(std::uint32_t n, double epsilon, std::uint32_t k,
                                std::span<const std::uint8_t> seed) {
  return sample_impl(n, epsilon, k, seed, false);
}

SampledConstruction sample_fig5(std::uint32_t n, double epsilon, std::uint32_t k,
                                std::span<const std::uint8_t> seed) {
  return sample_impl(n, epsilon, k, seed, true);
}

// --- amenability ---------------------------------------------------------------

SuffixGroups derive_suffix_groups(const DynamicGraphSpec& spec) {
  SuffixGroups out;
  std::map<std::vector<NodeId>, std::uint32_t> ids;
  for (std::uint32_t t = 1; t <= spec.dynamic_nodes(); ++t) {
    NodeId v = spec.prefix_nodes() + t;
    const auto& r = spec.potential_parents(v);
    auto [it, fresh] = ids.try_emplace(r, static_cast<std::uint32_t>(ids.size() + 1));
    std::uint32_t gid = it->second;
    if (fresh) {
      out.group_nodes.emplace_back();
      out.group_parents.push_back(r);
    }
    out.group_of.push_back(gid);
    out.group_nodes[gid - 1].push_back(v);
  }
  out.n_groups = static_cast<std::uint32_t>(out.group_nodes.size());
  return out;
}

AmenabilityReport check_amenable(const DynamicGraphSpec& spec, std::uint32_t trials) {
  AmenabilityReport report;
  std::uint32_t n_dyn = spec.dynamic_nodes();
  SuffixGroups groups = derive_suffix_groups(spec);
  report.n_groups = groups.n_groups;
  auto add = [&report](const std::string& name, bool pass, const std::string& detail) {
    report.clauses.push_back(ClauseResult{name, pass, detail});
  };

  // 1. uniform group size
  {
    bool pass = n_dyn > 0 && groups.n_groups > 0;
    std::uint32_t size0 = pass ? static_cast<std::uint32_t>(groups.group_nodes[0].size()) : 0;
    for (const auto& gn : groups.group_nodes) {
      if (gn.size() != size0) pass = false;
    }
    // Round-robin ordering: node t belongs to group (t-1) % n_groups + 1.
    if (pass) {
      for (std::uint32_t t = 1; t <= n_dyn; ++t) {
        if (groups.group_of[t - 1] != (t - 1) % groups.n_groups + 1) {
          pass = false;
          break;
        }
      }
    }
    report.group_size = size0;
    add("uniform-group-size", pass,
        pass ? std::to_string(groups.n_groups) + " groups of " + std::to_string(size0)
             : "groups are uneven or not round-robin");
  }

  // 2. potential parent count: every suffix node has exactly k potential
  // parents, and k is large enough to give each group member a distinct one.
  {
    bool pass = n_dyn > 0;
    std::uint32_t expect = spec.k();
    std::string detail;
    for (std::uint32_t t = 1; t <= n_dyn && pass; ++t) {
      NodeId v = spec.prefix_nodes() + t;
      if (spec.potential_parents(v).size() != expect) {
        pass = false;
        detail = "node " + std::to_string(v) + " has " +
                 std::to_string(spec.potential_parents(v).size()) + " potential parents, expected " +
                 std::to_string(expect);
      }
    }
    if (pass && report.group_size > expect) {
      pass = false;
      detail = "group size exceeds potential-parent count";
    }
    report.parent_set_size = expect;
    if (pass) detail = "every suffix node draws from " + std::to_string(expect) + " candidates";
    add("potential-parent-count", pass, detail);
  }

  // 3. potential parents outside the suffix
  {
    bool pass = true;
    std::string detail = "all candidate parents precede the dynamic suffix";
    for (std::uint32_t t = 1; t <= n_dyn && pass; ++t) {
      NodeId v = spec.prefix_nodes() + t;
      for (NodeId u : spec.potential_parents(v)) {
        if (u > spec.prefix_nodes()) {
          pass = false;
          detail = "node " + std::to_string(v) + " may draw suffix node " + std::to_string(u);
          break;
        }
      }
    }
    add("parents-outside-suffix", pass, detail);
  }

  // 4. same potential parents within each round-robin group
  {
    bool pass = true;
    std::string detail = "group members share one candidate set";
    if (groups.n_groups > 0) {
      for (std::uint32_t t = 1; t <= n_dyn && pass; ++t) {
        NodeId v = spec.prefix_nodes() + t;
        std::uint32_t gid = (t - 1) % groups.n_groups + 1;
        if (gid <= groups.n_groups && spec.potential_parents(v) != groups.group_parents[groups.group_of[t - 1] - 1]) {
          pass = false;
          detail = "node " + std::to_string(v) + " diverges from its group";
        }
      }
    }
    add("same-parents-within-group", pass, detail);
  }

  // 5. disjoint potential parents across groups
  {
    bool pass = true;
    std::string detail = "candidate sets are pairwise disjoint";
    std::set<NodeId> seen;
    for (const auto& r : groups.group_parents) {
      for (NodeId u : r) {
        if (!seen.insert(u).second) {
          pass = false;
          detail = "node " + std::to_string(u) + " appears in two groups";
        }
      }
      if (!pass) break;
    }
    add("disjoint-parents-across-groups", pass, detail);
  }

  // 6. no collision for parents: certification plus sampled resolutions
  {
    bool certified = spec.resolver() == ResolverKind::KeyedDistinct;
    bool pass = true;
    std::string detail;
    for (std::uint32_t trial = 0; trial < trials && pass; ++trial) {
      Bytes material = derive_seed(Bytes{}, "amenable-trial", trial);
      ResolvedDynamicGraph resolved = resolve_all(spec, material);
      std::vector<std::set<NodeId>> chosen(groups.n_groups);
      for (std::uint32_t t = 1; t <= n_dyn; ++t) {
        std::uint32_t gid = groups.group_of[t - 1];
        if (!chosen[gid - 1].insert(resolved.resolved[t - 1]).second) {
          pass = false;
          detail = "trial " + std::to_string(trial) + ": two nodes of group " + std::to_string(gid) +
                   " resolved to parent " + std::to_string(resolved.resolved[t - 1]);
          break;
        }
      }
    }
    if (pass) {
      detail = certified ? "resolver certifies distinctness; trials agree"
                         : "no collision found in trials (not certified by resolver)";
    }
    // Certification is required: a uniform resolver that merely got lucky in
    // trials still admits collisions, unless each group member has the whole
    // set to itself (k = 1 groups of size 1).
    bool structurally_free = report.group_size <= 1;
    add("no-parent-collisions", pass && (certified || structurally_free), detail);
  }

  // 7. static prefix / data independency
  {
    bool pass = spec.prefix_nodes() + n_dyn == spec.total_nodes();
    add("static-prefix", pass, "prefix edges are fixed before any resolution");
  }

  report.pass = true;
  for (const auto& c : report.clauses) report.pass = report.pass && c.pass;
  return report;
}

// --- random audit families -----------------------------------------------------

Dag random_dag(std::uint32_t n, std::uint32_t delta, std::span<const std::uint8_t> seed) {
  if (n < 1 || delta < 1) throw std::out_of_range("random_dag: n, delta >= 1");
  SeededRng rng(derive_seed(seed, "random-dag"));
  std::vector<std::vector<NodeId>> parents(n);
  for (NodeId v = 2; v <= n; ++v) {
    auto& ps = parents[v - 1];
    ps.push_back(v - 1);
    std::set<NodeId> extra;
    for (std::uint32_t c = 1; c < delta && v >= 3; ++c) {
      extra.insert(static_cast<NodeId>(1 + rng.below(v - 2)));  // in [1, v-2]
    }
    for (NodeId u : extra) ps.push_back(u);
  }
  std::uint32_t bound = std::max<std::uint32_t>(delta, max_indeg(parents));
  return Dag(n, std::move(parents), bound);
}

DynamicGraphSpec random_kspec(std::uint32_t n, std::uint32_t k, std::span<const std::uint8_t> seed) {
  if (n < 3) throw std::out_of_range("random_kspec: n >= 3");
  if (k < 1) throw std::out_of_range("random_kspec: k >= 1");
  SeededRng rng(derive_seed(seed, "random-kspec"));
  Dag base = Dag::line(2);
  std::vector<std::vector<NodeId>> potential(n - 2);
  for (NodeId v = 3; v <= n; ++v) {
    std::uint32_t pool = v - 2;  // candidates [1, v-2]
    auto& r = potential[v - 3];
    if (pool <= k) {
      for (NodeId u = 1; u <= pool; ++u) r.push_back(u);
    } else {
      std::set<NodeId> picks;
      while (picks.size() < k) picks.insert(static_cast<NodeId>(1 + rng.below(pool)));
      r.assign(picks.begin(), picks.end());
    }
  }
  return DynamicGraphSpec(std::move(base), std::move(potential), k, ResolverKind::Uniform);
}

// --- superconcentrator audit -----------------------------------------------------

std::uint32_t node_disjoint_paths(const Dag& g, std::span<const NodeId> sources,
                                  std::span<const NodeId> sinks) {
  // Node-split max flow: v -> (v_in = 2v, v_out = 2v+1), unit capacities.
  std::uint32_t n = g.size();
  std::uint32_t n_nodes = 2 * n + 4;
  std::uint32_t s_star = 0, t_star = 1;
  auto v_in = [](NodeId v) { return 2 * v; };
  auto v_out = [](NodeId v) { return 2 * v + 1; };

  struct Arc {
    std::uint32_t to;
    std::int32_t cap;
    std::size_t rev;
  };
  std::vector<std::vector<Arc>> adj(n_nodes);
  auto add_arc = [&adj](std::uint32_t a, std::uint32_t b, std::int32_t cap) {
    adj[a].push_back(Arc{b, cap, adj[b].size()});
    adj[b].push_back(Arc{a, 0, adj[a].size() - 1});
  };
  for (NodeId v = 1; v <= n; ++v) {
    add_arc(v_in(v), v_out(v), 1);
    for (NodeId u : g.parents(v)) add_arc(v_out(u), v_in(v), 1);
  }
  for (NodeId s : sources) add_arc(s_star, v_in(s), 1);
  for (NodeId t : sinks) add_arc(v_out(t), t_star, 1);

  // Edmonds-Karp; flows here are tiny.
  std::uint32_t flow = 0;
  while (true) {
    std::vector<std::pair<std::uint32_t, std::size_t>> pred(n_nodes, {UINT32_MAX, 0});
    std::queue<std::uint32_t> q;
    q.push(s_star);
    pred[s_star] = {s_star, 0};
    while (!q.empty() && pred[t_star].first == UINT32_MAX) {
      std::uint32_t a = q.front();
      q.pop();
      for (std::size_t i = 0; i < adj[a].size(); ++i) {
        const Arc& arc = adj[a][i];
        if (arc.cap > 0 && pred[arc.to].first == UINT32_MAX) {
          pred[arc.to] = {a, i};
          q.push(arc.to);
        }
      }
    }
    if (pred[t_star].first == UINT32_MAX) break;
    for (std::uint32_t v = t_star; v != s_star;) {
      auto [p, i] = pred[v];
      adj[p][i].cap -= 1;
      adj[adj[p][i].to][adj[p][i].rev].cap += 1;
      v = p;
    }
    ++flow;
  }
  return flow;
}

ScAuditResult audit_superconcentrator(const IoDag& sc, std::uint32_t samples_per_size,
                                      std::span<const std::uint8_t> seed) {
  ScAuditResult res;
  SeededRng rng(derive_seed(seed, "sc-audit"));
  std::uint32_t n = sc.inputs;
  auto inputs = sc.input_ids();
  auto outputs = sc.output_ids();
  auto sample_subset = [&rng](const std::vector<NodeId>& pool, std::uint32_t q) {
    std::vector<NodeId> copy = pool;
    for (std::uint32_t i = 0; i < q; ++i) {
      std::swap(copy[i], copy[i + rng.below(copy.size() - i)]);
    }
    copy.resize(q);
    return copy;
  };

  for (std::uint32_t q = 1; q <= n; ++q) {
    for (std::uint32_t it = 0; it < samples_per_size; ++it) {
      auto s1 = sample_subset(inputs, q);
      auto s2 = sample_subset(outputs, q);
      ++res.samples;
      std::uint32_t flow = node_disjoint_paths(sc.dag, s1, s2);
      if (flow != q) {
        ++res.failures;
        if (res.detail.empty()) {
          res.detail = "subset pair of size " + std::to_string(q) + " has only " + std::to_string(flow) +
                       " disjoint paths";
        }
      }
    }
  }

  // Ancestor-count bound: |I ∩ ancestors_{G-S}(Y)| >= N - |S| when |S| < |Y|.
  for (std::uint32_t it = 0; it < samples_per_size; ++it) {
    std::uint32_t y_size = 1 + static_cast<std::uint32_t>(rng.below(n));
    std::uint32_t s_size = y_size == 1 ? 0 : static_cast<std::uint32_t>(rng.below(y_size));
    auto y = sample_subset(outputs, y_size);
    std::vector<NodeId> all(sc.dag.size());
    for (NodeId v = 1; v <= sc.dag.size(); ++v) all[v - 1] = v;
    auto s = sample_subset(all, s_size);
    ++res.samples;

    RemoveResult reduced = remove(sc.dag, s);
    std::vector<NodeId> mapped_y;
    for (NodeId v : y) {
      if (reduced.old_to_new[v] != 0) mapped_y.push_back(reduced.old_to_new[v]);
    }
    auto anc = ancestors(reduced.dag, mapped_y);
    std::vector<std::uint8_t> hit(sc.dag.size() + 1, 0);
    for (NodeId v : anc) hit[reduced.new_to_old[v - 1]] = 1;
    for (NodeId v : mapped_y) hit[reduced.new_to_old[v - 1]] = 1;
    std::uint32_t count = 0;
    for (NodeId v : inputs) {
      if (hit[v]) ++count;
    }
    if (count + s_size < n) {
      ++res.failures;
      if (res.detail.empty()) {
        res.detail = "ancestor bound violated: " + std::to_string(count) + " + |S|=" + std::to_string(s_size) +
                     " < " + std::to_string(n);
      }
    }
  }

  res.pass = res.failures == 0;
  if (res.detail.empty()) res.detail = "all sampled subset pairs satisfied the property";
  return res;
}

}  // namespace pebblemark
