#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pebblemark/mhf.hpp"
#include "pebblemark/stats.hpp"

namespace pebblemark {

enum class EvaluatorMode { Full, Hybrid, NoShuffle };

std::string to_string(EvaluatorMode m);
EvaluatorMode evaluator_mode_from_string(const std::string& s);

/// Everything the challenger and any replaying attacker share: the graph, the
/// public oracle, and the memory configuration.
struct GameEnv {
  std::shared_ptr<const DynamicGraphSpec> spec;
  Oracle oracle;
  EvaluatorMode evaluator = EvaluatorMode::Full;
  std::uint64_t cache_capacity = 0;  // 0: required minimum
  EvictionPolicy policy = EvictionPolicy::Lru;

  LeakagePattern evaluate(std::span<const std::uint8_t> x, std::span<const std::uint8_t> coins) const;
};

struct GameConfig {
  std::uint32_t trials = 1000;
  std::uint32_t lambda_bits = 256;    // challenge-coin length
  std::uint32_t rounds = 1;           // adaptive rounds per game
  std::uint64_t attacker_budget_ms = 0;  // 0 = unlimited; overruns count as losses
  std::uint32_t jobs = 1;
  Bytes seed;                         // harness master seed
};

/// One adaptive round as the attacker sees it.
struct RoundView {
  Bytes x0, x1;
  const LeakagePattern* lp_first = nullptr;   // lp_b
  const LeakagePattern* lp_second = nullptr;  // lp_{1-b}
};

struct GameTranscript {
  struct Round {
    Bytes x0, x1;
    LeakagePattern lp_first, lp_second;
  };
  std::vector<Round> rounds;
  int challenge_bit = 0;
  int guess = 0;
};

/// A (stateful, per-game) attacker. observe() is called once per round;
/// next_pair() supplies the following round's challenge messages in adaptive
/// play; guess() ends the game.
class Attacker {
 public:
  virtual ~Attacker() = default;
  virtual void observe(const RoundView& round) = 0;
  virtual std::pair<Bytes, Bytes> next_pair(std::uint32_t round_index) = 0;
  virtual int guess() = 0;
};

using AttackerFactory = std::function<std::unique_ptr<Attacker>(const GameEnv&, SeededRng&)>;

std::vector<std::string> builtin_attackers();
AttackerFactory attacker_factory(const std::string& name);

struct AdvantageEstimate {
  std::uint64_t wins = 0;
  std::uint64_t trials = 0;
  double win_rate = 0;
  double advantage = 0;       // |win_rate - 1/2|
  WilsonInterval win_ci;      // 95% Wilson interval on the win rate
  double adv_ci_low = 0;
  double adv_ci_high = 0;
  std::uint64_t timeouts = 0;
};

AdvantageEstimate estimate_from_wins(std::uint64_t wins, std::uint64_t trials, std::uint64_t timeouts = 0);

/// The single-challenge game: fresh hidden bit and coins per trial; the
/// attacker sees (x0, x1, lp_b, lp_{1-b}).
AdvantageEstimate run_single(const GameEnv& env, const GameConfig& config, const std::string& attacker,
                             const Bytes& x0, const Bytes& x1);

/// The adaptive game: one hidden bit per game, `config.rounds` adaptive query
/// rounds, advantage over `config.trials` games.
AdvantageEstimate run_adaptive(const GameEnv& env, const GameConfig& config, const std::string& attacker);

/// Worst-case challenge corpus for the default experiments: all-zero, all-one,
/// and single-bit-difference inputs.
std::vector<std::pair<Bytes, Bytes>> default_challenge_pairs(std::size_t input_len = 16);

}  // namespace pebblemark
