#include "pebblemark/dag.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "pebblemark/rand.hpp"

namespace pebblemark {

Dag::Dag(std::uint32_t n, std::vector<std::vector<NodeId>> parents, std::uint32_t indeg_bound)
    : n_(n), indeg_bound_(indeg_bound), parents_(std::move(parents)) {
  if (parents_.size() != n_) throw std::invalid_argument("Dag: parent list size != n");
  for (std::uint32_t v = 1; v <= n_; ++v) {
    auto& ps = parents_[v - 1];
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    if (ps.size() > indeg_bound_) {
      throw std::invalid_argument("Dag: node " + std::to_string(v) + " exceeds indegree bound");
    }
    for (NodeId u : ps) {
      if (u < 1 || u >= v) {
        throw std::invalid_argument("Dag: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                    ") violates topological order");
      }
    }
  }
  if (n_ > 0 && !parents_[0].empty()) throw std::invalid_argument("Dag: node 1 must be a source");
}

Dag Dag::line(std::uint32_t n) {
  if (n < 1) throw std::out_of_range("line graph needs n >= 1");
  std::vector<std::vector<NodeId>> parents(n);
  for (std::uint32_t v = 2; v <= n; ++v) parents[v - 1] = {v - 1};
  return Dag(n, std::move(parents), 1);
}

std::vector<std::vector<NodeId>> Dag::children() const {
  std::vector<std::vector<NodeId>> ch(n_);
  for (std::uint32_t v = 1; v <= n_; ++v) {
    for (NodeId u : parents_[v - 1]) ch[u - 1].push_back(v);
  }
  return ch;
}

std::uint64_t Dag::edge_count() const {
  std::uint64_t total = 0;
  for (const auto& ps : parents_) total += ps.size();
  return total;
}

std::vector<NodeId> ancestors(const Dag& g, std::span<const NodeId> vs) {
  std::vector<NodeId> stack;
  for (NodeId v : vs) {
    g.check_node(v);
    stack.push_back(v);
  }
  std::vector<std::uint8_t> in_result(g.size() + 1, 0);
  // Reverse reachability from vs along parent edges; vs members only count if
  // some other member reaches them.
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : g.parents(v)) {
      if (!in_result[u]) {
        in_result[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<NodeId> out;
  for (NodeId u = 1; u <= g.size(); ++u) {
    if (in_result[u]) out.push_back(u);
  }
  return out;
}

std::uint32_t depth(const Dag& g) {
  std::uint32_t best = 0;
  std::vector<std::uint32_t> len(g.size() + 1, 0);
  for (NodeId v = 1; v <= g.size(); ++v) {
    std::uint32_t l = 1;
    for (NodeId u : g.parents(v)) l = std::max(l, len[u] + 1);
    len[v] = l;
    best = std::max(best, l);
  }
  return best;
}

RemoveResult remove(const Dag& g, std::span<const NodeId> s) {
  std::vector<std::uint8_t> drop(g.size() + 1, 0);
  for (NodeId v : s) {
    g.check_node(v);
    drop[v] = 1;
  }
  RemoveResult res;
  res.old_to_new.assign(g.size() + 1, 0);
  NodeId next = 0;
  for (NodeId v = 1; v <= g.size(); ++v) {
    if (!drop[v]) {
      res.old_to_new[v] = ++next;
      res.new_to_old.push_back(v);
    }
  }
  std::vector<std::vector<NodeId>> parents(next);
  for (NodeId v = 1; v <= g.size(); ++v) {
    if (drop[v]) continue;
    for (NodeId u : g.parents(v)) {
      if (!drop[u]) parents[res.old_to_new[v] - 1].push_back(res.old_to_new[u]);
    }
  }
  res.dag = Dag(next, std::move(parents), g.indeg_bound());
  return res;
}

Dag prefix(const Dag& g, NodeId i) {
  g.check_node(i);
  std::vector<std::vector<NodeId>> parents(i);
  for (NodeId v = 1; v <= i; ++v) parents[v - 1] = g.parents(v);
  return Dag(i, std::move(parents), g.indeg_bound());
}

bool check_reducibility_witness(const Dag& g, std::span<const NodeId> s, std::uint32_t d) {
  return depth(remove(g, s).dag) <= d;
}

DynamicGraphSpec::DynamicGraphSpec(Dag base, std::vector<std::vector<NodeId>> potential, std::uint32_t k,
                                   ResolverKind resolver)
    : base_(std::move(base)), potential_(std::move(potential)), k_(k), resolver_(resolver) {
  std::uint32_t prefix_n = base_.size();
  for (std::size_t t = 0; t < potential_.size(); ++t) {
    auto& r = potential_[t];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    NodeId v = prefix_n + static_cast<NodeId>(t) + 1;
    if (r.empty()) throw std::invalid_argument("DynamicGraphSpec: empty potential-parent set");
    if (r.size() > k_) {
      throw std::invalid_argument("DynamicGraphSpec: |R_" + std::to_string(v) + "| exceeds k");
    }
    for (NodeId u : r) {
      // The paper's model: r(i) < i-1, so the dynamic edge never duplicates
      // the path edge.
      if (u + 1 >= v) {
        throw std::invalid_argument("DynamicGraphSpec: potential parent " + std::to_string(u) +
                                    " of node " + std::to_string(v) + " must be < v-1");
      }
    }
  }
}

const std::vector<NodeId>& DynamicGraphSpec::potential_parents(NodeId v) const {
  if (!is_dynamic(v)) throw std::out_of_range("node " + std::to_string(v) + " is not dynamic");
  return potential_[v - base_.size() - 1];
}

std::vector<NodeId> DynamicGraphSpec::all_potential_parents(NodeId v) const {
  if (v < 1 || v > total_nodes()) throw std::out_of_range("node outside graph");
  if (!is_dynamic(v)) return base_.parents(v);
  std::vector<NodeId> out = potential_parents(v);
  out.push_back(v - 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- resolvers ------------------------------------------------------------

namespace {

NodeId resolve_uniform(const DynamicGraphSpec& spec, std::span<const std::uint8_t> material, NodeId v) {
  const auto& r = spec.potential_parents(v);
  SeededRng rng(derive_seed(material, "resolve", v));
  return r[rng.below(r.size())];
}

// Keyed-distinct rule: group dynamic nodes by identical R-sets; the t-th
// selection from a group picks element perm[t] of a keyed shuffle of that
// group's R-set. Distinctness within a group is structural.
NodeId resolve_keyed(const DynamicGraphSpec& spec, std::span<const std::uint8_t> material, NodeId v,
                     std::uint32_t step_in_group, std::uint64_t group_id) {
  const auto& r = spec.potential_parents(v);
  std::vector<std::uint32_t> idx(r.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeededRng rng(derive_seed(material, "keyed-block", group_id));
  for (std::uint32_t i = static_cast<std::uint32_t>(idx.size()) - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng.below(i + 1)]);
  }
  if (step_in_group >= r.size()) {
    throw std::logic_error("keyed resolver: more selections than potential parents in group");
  }
  return r[idx[step_in_group]];
}

}  // namespace

ResolvedDynamicGraph resolve_all(const DynamicGraphSpec& spec, std::span<const std::uint8_t> material) {
  std::uint32_t prefix_n = spec.prefix_nodes();
  std::uint32_t total = spec.total_nodes();
  std::vector<std::vector<NodeId>> parents(total);
  for (NodeId v = 1; v <= prefix_n; ++v) parents[v - 1] = spec.base().parents(v);

  // Group ids for the keyed resolver: nodes sharing one R-set form a group.
  std::map<std::vector<NodeId>, std::uint64_t> group_of;
  std::map<std::uint64_t, std::uint32_t> steps_taken;

  ResolvedDynamicGraph out;
  for (NodeId v = prefix_n + 1; v <= total; ++v) {
    NodeId r;
    if (spec.resolver() == ResolverKind::Uniform) {
      r = resolve_uniform(spec, material, v);
    } else {
      const auto& rs = spec.potential_parents(v);
      auto [it, fresh] = group_of.try_emplace(rs, group_of.size());
      std::uint64_t gid = it->second;
      r = resolve_keyed(spec, material, v, steps_taken[gid]++, gid);
    }
    out.resolved.push_back(r);
    parents[v - 1] = {r, v - 1};
  }
  out.dag = Dag(total, std::move(parents), std::max<std::uint32_t>(spec.base().indeg_bound(), 2));
  out.provenance = "material:" + to_hex(material);
  return out;
}

// --- text format -----------------------------------------------------------

std::string serialize(const Dag& g) {
  std::ostringstream out;
  out << "dag " << g.size() << ' ' << g.indeg_bound() << '\n';
  for (NodeId v = 1; v <= g.size(); ++v) {
    out << v << ':';
    for (NodeId u : g.parents(v)) out << ' ' << u;
    out << '\n';
  }
  return out.str();
}

std::string serialize(const DynamicGraphSpec& spec) {
  std::ostringstream out;
  out << "dyn " << spec.total_nodes() << ' ' << spec.k() << ' ' << spec.prefix_nodes() << '\n';
  for (NodeId v = 1; v <= spec.prefix_nodes(); ++v) {
    out << v << ':';
    for (NodeId u : spec.base().parents(v)) out << ' ' << u;
    out << '\n';
  }
  for (NodeId v = spec.prefix_nodes() + 1; v <= spec.total_nodes(); ++v) {
    out << v << " ?";
    for (NodeId u : spec.potential_parents(v)) out << ' ' << u;
    out << '\n';
  }
  return out.str();
}

namespace {

struct LineLexer {
  std::istringstream in;
  std::size_t lineno = 0;
  std::string line;

  explicit LineLexer(const std::string& text) : in(text) {}

  bool next() {
    if (!std::getline(in, line)) return false;
    ++lineno;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(lineno, what); }
};

std::vector<std::uint64_t> parse_uints(LineLexer& lex, const std::string& s) {
  std::vector<std::uint64_t> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) lex.fail("expected integer, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// "<v>: p1 p2" or "<v> ? r1 r2"; returns (v, is_dynamic, values).
std::tuple<std::uint64_t, bool, std::vector<std::uint64_t>> parse_node_line(LineLexer& lex) {
  const std::string& s = lex.line;
  auto colon = s.find(':');
  auto quest = s.find('?');
  bool dynamic = false;
  std::size_t sep;
  if (colon != std::string::npos && (quest == std::string::npos || colon < quest)) {
    sep = colon;
  } else if (quest != std::string::npos) {
    sep = quest;
    dynamic = true;
  } else {
    lex.fail("node line missing ':' or '?'");
  }
  std::uint64_t v = 0;
  {
    std::string head = s.substr(0, sep);
    std::istringstream hin(head);
    std::string tok;
    if (!(hin >> tok)) lex.fail("node line missing node id");
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) lex.fail("bad node id '" + tok + "'");
    std::string extra;
    if (hin >> extra) lex.fail("unexpected token '" + extra + "' before separator");
  }
  auto vals = parse_uints(lex, s.substr(sep + 1));
  return {v, dynamic, vals};
}

}  // namespace

ParsedGraph parse_graph(const std::string& text) {
  LineLexer lex(text);
  if (!lex.next()) throw ParseError(1, "empty input");
  std::istringstream head(lex.line);
  std::string kind;
  head >> kind;
  ParsedGraph out;
  if (kind == "dag") {
    std::uint64_t n = 0, delta = 0;
    if (!(head >> n >> delta)) lex.fail("dag header needs '<n> <indeg_bound>'");
    std::vector<std::vector<NodeId>> parents(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (!lex.next()) lex.fail("expected " + std::to_string(n) + " node lines");
      auto [v, dyn, vals] = parse_node_line(lex);
      if (dyn) lex.fail("dynamic node line in a static dag file");
      if (v != i) lex.fail("expected node " + std::to_string(i));
      auto& ps = parents[i - 1];
      for (auto p : vals) {
        if (p < 1 || p >= v) lex.fail("parent " + std::to_string(p) + " out of range for node " + std::to_string(v));
        ps.push_back(static_cast<NodeId>(p));
      }
    }
    try {
      out.dag = Dag(static_cast<std::uint32_t>(n), std::move(parents), static_cast<std::uint32_t>(delta));
    } catch (const std::invalid_argument& e) {
      lex.fail(e.what());
    }
  } else if (kind == "dyn") {
    std::uint64_t n = 0, k = 0, prefix_n = 0;
    if (!(head >> n >> k >> prefix_n)) lex.fail("dyn header needs '<n> <k> <static_prefix_len>'");
    if (prefix_n > n) lex.fail("static prefix longer than graph");
    std::vector<std::vector<NodeId>> parents(prefix_n);
    std::vector<std::vector<NodeId>> potential;
    std::uint32_t max_static_indeg = 0;
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (!lex.next()) lex.fail("expected " + std::to_string(n) + " node lines");
      auto [v, dyn, vals] = parse_node_line(lex);
      if (v != i) lex.fail("expected node " + std::to_string(i));
      if (i <= prefix_n) {
        if (dyn) lex.fail("dynamic line inside static prefix");
        for (auto p : vals) {
          if (p < 1 || p >= v) lex.fail("parent out of range for node " + std::to_string(v));
          parents[i - 1].push_back(static_cast<NodeId>(p));
        }
        max_static_indeg = std::max<std::uint32_t>(max_static_indeg, static_cast<std::uint32_t>(vals.size()));
      } else {
        if (!dyn) lex.fail("static line in dynamic suffix (node " + std::to_string(v) + ")");
        if (vals.empty()) lex.fail("dynamic node " + std::to_string(v) + " has empty R set");
        if (vals.size() > k) lex.fail("dynamic node " + std::to_string(v) + " has |R| > k");
        std::vector<NodeId> r;
        for (auto p : vals) {
          if (p < 1 || p + 1 >= v) lex.fail("potential parent " + std::to_string(p) + " must be < v-1");
          r.push_back(static_cast<NodeId>(p));
        }
        potential.push_back(std::move(r));
      }
    }
    try {
      Dag base(static_cast<std::uint32_t>(prefix_n), std::move(parents), std::max<std::uint32_t>(max_static_indeg, 1));
      out.spec = DynamicGraphSpec(std::move(base), std::move(potential), static_cast<std::uint32_t>(k));
    } catch (const std::invalid_argument& e) {
      lex.fail(e.what());
    }
  } else {
    lex.fail("unknown header '" + kind + "' (expected 'dag' or 'dyn')");
  }
  while (lex.next()) {
    if (!lex.line.empty()) lex.fail("trailing content after node lines");
  }
  return out;
}

Dag parse_dag(const std::string& text) {
  auto parsed = parse_graph(text);
  if (!parsed.dag) throw std::invalid_argument("parse_dag: input is a dynamic spec");
  return *parsed.dag;
}

DynamicGraphSpec parse_dynamic_spec(const std::string& text) {
  auto parsed = parse_graph(text);
  if (!parsed.spec) throw std::invalid_argument("parse_dynamic_spec: input is a static dag");
  return *parsed.spec;
}

std::string graph_hash(const Dag& g) {
  std::string text = serialize(g);
  return to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
}

std::string graph_hash(const DynamicGraphSpec& spec) {
  std::string text = serialize(spec);
  return to_hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())));
}

}  // namespace pebblemark
