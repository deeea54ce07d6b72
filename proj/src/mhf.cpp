#include "pebblemark/mhf.hpp"

#include <algorithm>
#include <numeric>

#include "pebblemark/rand.hpp"

namespace pebblemark {

Oracle::Oracle(Bytes seed, std::uint32_t width_bytes) : seed_(std::move(seed)), width_(width_bytes) {
  if (width_ < 1 || width_ > 32) throw std::invalid_argument("Oracle: width in [1, 32] bytes");
}

Bytes Oracle::label_of(std::uint64_t node, std::span<const std::uint8_t> payload) const {
  Bytes query = seed_;
  append_u64(query, node);
  append_bytes(query, payload);
  auto digest = sha256(query);
  return Bytes(digest.begin(), digest.begin() + width_);
}

namespace {

std::vector<std::uint32_t> shuffled_identity(std::uint32_t m, SeededRng& rng) {
  std::vector<std::uint32_t> fwd(m);
  std::iota(fwd.begin(), fwd.end(), 1u);
  for (std::uint32_t i = m - 1; i > 0; --i) {
    std::swap(fwd[i], fwd[static_cast<std::uint32_t>(rng.below(i + 1))]);
  }
  return fwd;
}

std::vector<std::uint32_t> invert(const std::vector<std::uint32_t>& fwd) {
  std::vector<std::uint32_t> inv(fwd.size());
  for (std::uint32_t i = 0; i < fwd.size(); ++i) inv[fwd[i] - 1] = i + 1;
  return inv;
}

}  // namespace

PrfPermutation::PrfPermutation(Bytes key, std::uint32_t m) : key_(std::move(key)), m_(m) {
  if (m_ < 1) throw std::out_of_range("PrfPermutation: empty domain");
}

const PrfPermutation::Tables& PrfPermutation::tables(std::uint64_t tweak) const {
  auto it = memo_.find(tweak);
  if (it == memo_.end()) {
    SeededRng rng(derive_seed(key_, "prf-perm", tweak));
    Tables t;
    t.fwd = shuffled_identity(m_, rng);
    t.inv = invert(t.fwd);
    it = memo_.emplace(tweak, std::move(t)).first;
  }
  return it->second;
}

std::uint32_t PrfPermutation::enc(std::uint64_t tweak, std::uint32_t p) const {
  if (p < 1 || p > m_) throw std::out_of_range("enc: point outside domain");
  return tables(tweak).fwd[p - 1];
}

std::uint32_t PrfPermutation::dec(std::uint64_t tweak, std::uint32_t q) const {
  if (q < 1 || q > m_) throw std::out_of_range("dec: point outside domain");
  return tables(tweak).inv[q - 1];
}

TableRandomPermutation::TableRandomPermutation(Bytes entropy, std::uint32_t m)
    : entropy_(std::move(entropy)), m_(m) {
  if (m_ < 1) throw std::out_of_range("TableRandomPermutation: empty domain");
}

const TableRandomPermutation::Tables& TableRandomPermutation::tables(std::uint64_t tweak) const {
  auto it = memo_.find(tweak);
  if (it == memo_.end()) {
    SeededRng rng(derive_seed(entropy_, "random-family", tweak));
    Tables t;
    t.fwd = shuffled_identity(m_, rng);
    t.inv = invert(t.fwd);
    it = memo_.emplace(tweak, std::move(t)).first;
  }
  return it->second;
}

std::uint32_t TableRandomPermutation::enc(std::uint64_t tweak, std::uint32_t p) const {
  if (p < 1 || p > m_) throw std::out_of_range("enc: point outside domain");
  return tables(tweak).fwd[p - 1];
}

std::uint32_t TableRandomPermutation::dec(std::uint64_t tweak, std::uint32_t q) const {
  if (q < 1 || q > m_) throw std::out_of_range("dec: point outside domain");
  return tables(tweak).inv[q - 1];
}

// --- plain labeling -----------------------------------------------------------

namespace {

std::vector<Bytes> label_all(const Dag& g, const Oracle& oracle, std::span<const std::uint8_t> x,
                             NodeId upto) {
  std::vector<Bytes> labels(upto + 1);
  for (NodeId v = 1; v <= upto; ++v) {
    const auto& ps = g.parents(v);
    if (ps.empty()) {
      labels[v] = oracle.label_of(v, x);
    } else {
      Bytes payload;
      payload.reserve(ps.size() * oracle.width());
      for (NodeId u : ps) append_bytes(payload, labels[u]);
      labels[v] = oracle.label_of(v, payload);
    }
  }
  return labels;
}

std::vector<NodeId> sinks_of(const Dag& g) {
  std::vector<std::uint8_t> has_child(g.size() + 1, 0);
  for (NodeId v = 1; v <= g.size(); ++v) {
    for (NodeId u : g.parents(v)) has_child[u] = 1;
  }
  std::vector<NodeId> out;
  for (NodeId v = 1; v <= g.size(); ++v) {
    if (!has_child[v]) out.push_back(v);
  }
  return out;
}

}  // namespace

Bytes label(const Dag& g, const Oracle& oracle, std::span<const std::uint8_t> x, NodeId v) {
  g.check_node(v);
  return label_all(g, oracle, x, v)[v];
}

Bytes f_value(const Dag& g, const Oracle& oracle, std::span<const std::uint8_t> x) {
  if (g.size() == 0) throw std::invalid_argument("f_value: empty graph");
  auto labels = label_all(g, oracle, x, g.size());
  Bytes out;
  for (NodeId s : sinks_of(g)) append_bytes(out, labels[s]);
  return out;
}

// --- evaluator ------------------------------------------------------------------

std::uint64_t required_cache_capacity(const DynamicGraphSpec& spec) {
  // One block of labels for the in-cache shuffle plus the walk's working set
  // (previous label, fetched parent, fresh label, one spare). The U arrays are
  // index metadata and live with the evaluator's registers.
  return static_cast<std::uint64_t>(spec.k()) + 4;
}

namespace {

std::uint32_t label_mod(const Bytes& label, std::uint32_t q) {
  std::uint64_t r = 0;
  for (std::uint8_t b : label) r = (r * 256 + b) % q;
  return static_cast<std::uint32_t>(r);
}

EvalResult eval_impl(const DynamicGraphSpec& spec, const Oracle& oracle, std::span<const std::uint8_t> x,
                     std::span<const std::uint8_t> coins, TieredMemory& mem, EvalOptions options,
                     PermFamily family) {
  if (!options.skip_amenability_check) {
    AmenabilityReport rep = check_amenable(spec);
    if (!rep.pass) {
      std::string why;
      for (const auto& c : rep.clauses) {
        if (!c.pass) why += (why.empty() ? "" : "; ") + c.name + ": " + c.detail;
      }
      throw std::invalid_argument("mhf_eval: graph is not amenable to shuffling (" + why + ")");
    }
  }
  std::uint64_t needed = required_cache_capacity(spec);
  if (mem.cache_capacity() < needed) {
    throw std::invalid_argument("mhf_eval: cache capacity " + std::to_string(mem.cache_capacity()) +
                                " below required working set " + std::to_string(needed));
  }
  if (mem.label_width() != oracle.width()) {
    throw std::invalid_argument("mhf_eval: memory label width != oracle width");
  }

  SuffixGroups groups = derive_suffix_groups(spec);
  std::uint32_t n_blocks = groups.n_groups;
  std::uint32_t block_size = spec.k();
  // Blocks must be contiguous address ranges so the ascending flush is
  // meaningful.
  std::vector<NodeId> offsets(n_blocks);
  for (std::uint32_t j = 0; j < n_blocks; ++j) {
    const auto& parents = groups.group_parents[j];
    if (parents.size() != block_size || parents.back() - parents.front() + 1 != block_size) {
      throw std::invalid_argument("mhf_eval: potential-parent blocks must be contiguous");
    }
    offsets[j] = parents.front();
  }

  EvalResult result;
  auto span_begin = [&](const std::string& name, std::uint32_t block) {
    result.phases.push_back(EvalPhaseSpan{name, block, mem.round() + 1, mem.round() + 1});
  };
  auto span_end = [&]() { result.phases.back().round_end = mem.round() + 1; };

  const std::uint32_t prefix_n = spec.prefix_nodes();
  const Dag& base = spec.base();

  // Phase 1: data-independent labeling of the static prefix.
  span_begin("static", 0);
  for (NodeId v = 1; v <= prefix_n; ++v) {
    mem.advance_round();
    const auto& ps = base.parents(v);
    Bytes lab;
    if (ps.empty()) {
      lab = oracle.label_of(v, x);
    } else {
      Bytes payload;
      payload.reserve(ps.size() * oracle.width());
      for (NodeId u : ps) append_bytes(payload, mem.load(u));
      lab = oracle.label_of(v, payload);
    }
    mem.store(v, std::move(lab));
  }
  span_end();

  // Phase 2: keyed in-cache shuffle of every block.
  Bytes perm_key = derive_seed(coins, "perm-key");
  std::unique_ptr<KeyedPermutation> perm;
  if (family == PermFamily::Prf) {
    perm = std::make_unique<PrfPermutation>(perm_key, block_size);
  } else {
    perm = std::make_unique<TableRandomPermutation>(perm_key, block_size);
  }
  auto enc_of = [&](std::uint32_t j, std::uint32_t p) -> std::uint32_t {
    if (!options.shuffle) return p;  // ablation: identity layout
    return perm->enc(j, p);
  };

  for (std::uint32_t j = 1; j <= n_blocks; ++j) {
    NodeId base_addr = offsets[j - 1];
    std::vector<Bytes> labels(block_size);
    span_begin("shuffle-load", j);
    mem.advance_round();
    for (std::uint32_t p = 1; p <= block_size; ++p) labels[p - 1] = mem.load(base_addr + p - 1);
    span_end();
    span_begin("shuffle", j);
    mem.advance_round();
    for (std::uint32_t p = 1; p <= block_size; ++p) {
      mem.store(base_addr + enc_of(j, p) - 1, std::move(labels[p - 1]));
    }
    span_end();
    span_begin("shuffle-flush", j);
    mem.advance_round();
    mem.flush_block_ascending(base_addr, base_addr + block_size - 1);
    span_end();
  }

  // Phase 3: label-driven walk over the shuffled slots.
  std::uint32_t n_dyn = spec.dynamic_nodes();
  std::vector<std::vector<std::uint32_t>> used(n_blocks);
  for (auto& u : used) {
    u.resize(block_size);
    std::iota(u.begin(), u.end(), 1u);
  }
  std::vector<std::uint32_t> steps(n_blocks, 0);
  std::vector<std::vector<std::uint8_t>> picked(n_blocks, std::vector<std::uint8_t>(block_size + 1, 0));

  // The running label L(i-1) stays in evaluator registers between steps; only
  // the very first step must fetch it from its (possibly shuffled) slot.
  auto slot_of = [&](NodeId v) -> std::uint64_t {
    for (std::uint32_t j = 1; j <= n_blocks; ++j) {
      if (v >= offsets[j - 1] && v < offsets[j - 1] + block_size) {
        return offsets[j - 1] + enc_of(j, v - offsets[j - 1] + 1) - 1;
      }
    }
    return v;
  };
  Bytes running;
  {
    span_begin("walk-seed", 0);
    mem.advance_round();
    running = mem.load(slot_of(prefix_n));
    span_end();
  }

  span_begin("walk", 0);
  for (std::uint32_t t = 1; t <= n_dyn; ++t) {
    mem.advance_round();
    NodeId v = prefix_n + t;
    std::uint32_t j = groups.group_of[t - 1];
    std::uint32_t s = ++steps[j - 1];
    if (s > block_size) throw std::logic_error("mhf_eval: block selection exhausted");
    std::uint32_t m = label_mod(running, block_size - s + 1) + 1;
    std::uint32_t p = used[j - 1][m - 1];
    NodeId r_node = offsets[j - 1] + p - 1;
    Bytes r_label = mem.load(offsets[j - 1] + enc_of(j, p) - 1);
    Bytes payload;
    payload.reserve(2 * oracle.width());
    append_bytes(payload, r_label);    // r(i) < i-1: ascending parent order
    append_bytes(payload, running);
    Bytes lab = oracle.label_of(v, payload);
    mem.store(v, lab);
    picked[j - 1][p] = 1;
    std::swap(used[j - 1][m - 1], used[j - 1][block_size - s]);
    result.resolved.push_back(r_node);
    running = std::move(lab);

    if (block_size <= 64) {
      // Unused-prefix invariant: after s selections the first block_size - s
      // entries of U are exactly the never-chosen slots.
      std::vector<std::uint8_t> seen(block_size + 1, 0);
      for (std::uint32_t i = 0; i < block_size; ++i) {
        std::uint32_t slot = used[j - 1][i];
        if (slot < 1 || slot > block_size || seen[slot]) throw std::logic_error("mhf_eval: U array corrupted");
        seen[slot] = 1;
        bool expect_unpicked = i < block_size - s;
        if (expect_unpicked == static_cast<bool>(picked[j - 1][slot])) {
          throw std::logic_error("mhf_eval: unused-prefix invariant violated");
        }
      }
    }
  }
  span_end();

  // Output: concatenated sink labels of the resolved graph.
  std::vector<std::uint8_t> has_child(spec.total_nodes() + 1, 0);
  for (NodeId v = 1; v <= prefix_n; ++v) {
    for (NodeId u : base.parents(v)) has_child[u] = 1;
  }
  for (std::uint32_t t = 1; t <= n_dyn; ++t) {
    has_child[prefix_n + t - 1] = 1;          // path edge
    has_child[result.resolved[t - 1]] = 1;    // resolved dynamic edge
  }
  span_begin("output", 0);
  mem.advance_round();
  for (NodeId v = 1; v <= spec.total_nodes(); ++v) {
    if (has_child[v]) continue;
    // Sinks inside a shuffled block live at their permuted slot.
    Bytes lab;
    bool shuffled = false;
    for (std::uint32_t j = 1; j <= n_blocks && !shuffled; ++j) {
      if (v >= offsets[j - 1] && v < offsets[j - 1] + block_size) {
        lab = mem.load(offsets[j - 1] + enc_of(j, v - offsets[j - 1] + 1) - 1);
        shuffled = true;
      }
    }
    if (!shuffled) lab = mem.load(v);
    append_bytes(result.output, lab);
  }
  span_end();

  result.leakage = mem.leakage();
  return result;
}

}  // namespace

EvalResult mhf_eval(const DynamicGraphSpec& spec, const Oracle& oracle, std::span<const std::uint8_t> x,
                    std::span<const std::uint8_t> coins, TieredMemory& mem, EvalOptions options) {
  return eval_impl(spec, oracle, x, coins, mem, options, options.family);
}

EvalResult mhf_eval_hybrid(const DynamicGraphSpec& spec, const Oracle& oracle,
                           std::span<const std::uint8_t> x, std::span<const std::uint8_t> coins,
                           TieredMemory& mem, EvalOptions options) {
  return eval_impl(spec, oracle, x, coins, mem, options, PermFamily::TrulyRandom);
}

}  // namespace pebblemark
