#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "pebblemark/hashing.hpp"

namespace pebblemark {

/// Deterministic RNG expanded from a byte seed. All builder / harness
/// randomness flows through this so that every run is a pure function of its
/// explicit seeds (mt19937_64 is fully specified by the standard, so streams
/// are stable across platforms).
class SeededRng {
 public:
  explicit SeededRng(std::span<const std::uint8_t> seed);
  explicit SeededRng(std::uint64_t seed);

  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

  /// Uniform in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) { return uniform(0, n - 1); }

  double uniform_real();  // [0, 1)

  bool coin() { return uniform(0, 1) == 1; }

  Bytes bytes(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Derive an independent child seed from (seed, tag). Used wherever one
/// experiment seed has to fan out into per-component streams.
Bytes derive_seed(std::span<const std::uint8_t> seed, const std::string& tag, std::uint64_t index = 0);

}  // namespace pebblemark
