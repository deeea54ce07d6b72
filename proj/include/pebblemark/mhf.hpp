#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pebblemark/builders.hpp"
#include "pebblemark/dag.hpp"
#include "pebblemark/memory.hpp"

namespace pebblemark {

/// Random-oracle stand-in: truncated SHA-256 keyed by a seed, with the node id
/// encoded fixed-width ahead of the payload for domain separation.
class Oracle {
 public:
  Oracle(Bytes seed, std::uint32_t width_bytes = 32);

  std::uint32_t width() const { return width_; }
  const Bytes& seed() const { return seed_; }

  Bytes label_of(std::uint64_t node, std::span<const std::uint8_t> payload) const;

 private:
  Bytes seed_;
  std::uint32_t width_;
};

/// Keyed bijection on [1, m]. enc/dec take a tweak so one key covers every
/// block of a construction.
class KeyedPermutation {
 public:
  virtual ~KeyedPermutation() = default;
  virtual std::uint32_t domain() const = 0;
  virtual std::uint32_t enc(std::uint64_t tweak, std::uint32_t p) const = 0;
  virtual std::uint32_t dec(std::uint64_t tweak, std::uint32_t q) const = 0;
};

/// PRF-seeded shuffle of [1, m] per (key, tweak): the pseudorandom permutation
/// the real evaluator uses.
class PrfPermutation : public KeyedPermutation {
 public:
  PrfPermutation(Bytes key, std::uint32_t m);
  std::uint32_t domain() const override { return m_; }
  std::uint32_t enc(std::uint64_t tweak, std::uint32_t p) const override;
  std::uint32_t dec(std::uint64_t tweak, std::uint32_t q) const override;

 private:
  struct Tables {
    std::vector<std::uint32_t> fwd, inv;
  };
  const Tables& tables(std::uint64_t tweak) const;

  Bytes key_;
  std::uint32_t m_;
  mutable std::unordered_map<std::uint64_t, Tables> memo_;
};

/// Ideal-cipher stand-in: a lazily sampled table per (key, tweak), drawn from
/// an entropy stream independent of the PRF key schedule.
class TableRandomPermutation : public KeyedPermutation {
 public:
  TableRandomPermutation(Bytes entropy, std::uint32_t m);
  std::uint32_t domain() const override { return m_; }
  std::uint32_t enc(std::uint64_t tweak, std::uint32_t p) const override;
  std::uint32_t dec(std::uint64_t tweak, std::uint32_t q) const override;

 private:
  struct Tables {
    std::vector<std::uint32_t> fwd, inv;
  };
  const Tables& tables(std::uint64_t tweak) const;

  Bytes entropy_;
  std::uint32_t m_;
  mutable std::unordered_map<std::uint64_t, Tables> memo_;
};

/// Recursive labeling of a static DAG: sources hash (v, x), inner nodes hash
/// (v, parent labels in ascending node order).
Bytes label(const Dag& g, const Oracle& oracle, std::span<const std::uint8_t> x, NodeId v);

/// Concatenated sink labels, sinks in ascending node order.
Bytes f_value(const Dag& g, const Oracle& oracle, std::span<const std::uint8_t> x);

struct EvalPhaseSpan {
  std::string name;            // static | shuffle-load | shuffle | shuffle-flush | walk | output
  std::uint32_t block = 0;     // 1-based block for shuffle spans
  std::uint64_t round_begin = 0;
  std::uint64_t round_end = 0; // half-open
};

struct EvalResult {
  Bytes output;
  LeakagePattern leakage;
  std::vector<EvalPhaseSpan> phases;
  std::vector<NodeId> resolved;  // r(i) per dynamic node, in walk order
};

enum class PermFamily { Prf, TrulyRandom };

struct EvalOptions {
  PermFamily family = PermFamily::Prf;
  bool shuffle = true;                 // ablation hook for the game harness
  bool skip_amenability_check = false; // harness may pre-validate the graph once
};

/// Labels one block of labels plus a small working set; the evaluator refuses
/// to run below this (a silent spill would void the leakage guarantee).
std::uint64_t required_cache_capacity(const DynamicGraphSpec& spec);

/// Three-phase computationally data-independent evaluation: data-independent
/// labeling of the static prefix, keyed in-cache shuffle of every
/// potential-parent block, then the label-driven walk of the dynamic suffix
/// over the shuffled slots. The output never depends on the permutation key;
/// the leakage does.
EvalResult mhf_eval(const DynamicGraphSpec& spec, const Oracle& oracle, std::span<const std::uint8_t> x,
                    std::span<const std::uint8_t> coins, TieredMemory& mem, EvalOptions options = {});

/// Fig.-8-style hybrid: identical to mhf_eval but with the truly random
/// permutation family.
EvalResult mhf_eval_hybrid(const DynamicGraphSpec& spec, const Oracle& oracle,
                           std::span<const std::uint8_t> x, std::span<const std::uint8_t> coins,
                           TieredMemory& mem, EvalOptions options = {});

}  // namespace pebblemark
