#pragma once

#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

#include "pebblemark/hashing.hpp"

namespace pebblemark {

enum class EvictionPolicy { Lru, Fifo };

std::string to_string(EvictionPolicy p);
EvictionPolicy policy_from_string(const std::string& s);

struct AccessEvent {
  enum class Kind : std::uint8_t { Request, Store };
  Kind kind = Kind::Request;
  std::uint64_t addr = 0;
  std::uint32_t size = 0;   // label width in bytes, constant per trace
  std::uint64_t round = 0;

  bool operator==(const AccessEvent&) const = default;
};

/// RAM-visible (request, store) address/size events of one execution. Cache
/// hits contribute nothing and no payload bytes are ever recorded.
class LeakagePattern {
 public:
  LeakagePattern() = default;
  LeakagePattern(std::uint32_t label_width, std::uint64_t cache_capacity, EvictionPolicy policy)
      : label_width_(label_width), cache_capacity_(cache_capacity), policy_(policy) {}

  std::uint32_t label_width() const { return label_width_; }
  std::uint64_t cache_capacity() const { return cache_capacity_; }
  EvictionPolicy policy() const { return policy_; }
  const std::vector<AccessEvent>& events() const { return events_; }

  void push(AccessEvent e) { events_.push_back(e); }

  /// Attacker-facing projection: the event sequence as (kind, addr) pairs,
  /// with or without round boundaries.
  std::vector<std::uint64_t> projection(bool include_rounds) const;

  /// Events whose round lies in [begin, end).
  std::vector<AccessEvent> events_in_rounds(std::uint64_t begin, std::uint64_t end) const;

  bool operator==(const LeakagePattern&) const = default;

  // Trace text format: "trace v1 <label_width> <cache_capacity> <policy>" then
  // one "R <addr> <size> <round>" / "S <addr> <size> <round>" line per event.
  std::string serialize() const;
  static LeakagePattern parse(const std::string& text);

 private:
  std::uint32_t label_width_ = 0;
  std::uint64_t cache_capacity_ = 0;
  EvictionPolicy policy_ = EvictionPolicy::Lru;
  std::vector<AccessEvent> events_;
};

/// Two-tier write-back memory: bounded cache over a RAM address space of
/// label-sized slots. Requests are emitted on misses, stores when a dirty line
/// leaves cache (eviction or explicit flush). A round is whatever instruction
/// step the caller declares via advance_round.
class TieredMemory {
 public:
  TieredMemory(std::uint64_t cache_capacity, EvictionPolicy policy, std::uint32_t label_width);

  std::uint64_t cache_capacity() const { return capacity_; }
  EvictionPolicy policy() const { return policy_; }
  std::uint32_t label_width() const { return width_; }

  void advance_round() { ++round_; }
  std::uint64_t round() const { return round_; }

  /// Load a previously written slot; faults on unwritten addresses.
  Bytes load(std::uint64_t addr);

  /// Write-back store: the value lands in cache dirty, RAM is touched only on
  /// eviction or flush.
  void store(std::uint64_t addr, Bytes label);

  /// Write back every dirty cached line with address in [lo, hi], ascending;
  /// lines stay cached clean. The canonical store order hides any in-cache
  /// permutation from the bus.
  void flush_block_ascending(std::uint64_t lo, std::uint64_t hi);

  bool cached(std::uint64_t addr) const { return cache_.count(addr) != 0; }
  std::uint64_t cached_lines() const { return cache_.size(); }

  const LeakagePattern& leakage() const { return pattern_; }

 private:
  struct Line {
    Bytes label;
    bool dirty = false;
    std::uint64_t tick = 0;  // recency under LRU, insertion order under FIFO
  };

  void install(std::uint64_t addr, Bytes label, bool dirty);
  void evict_one();
  void check_capacity() const;

  std::uint64_t capacity_;
  EvictionPolicy policy_;
  std::uint32_t width_;
  std::uint64_t round_ = 0;
  std::uint64_t tick_ = 0;
  std::unordered_map<std::uint64_t, Bytes> ram_;
  std::unordered_map<std::uint64_t, Line> cache_;
  LeakagePattern pattern_;
};

}  // namespace pebblemark
