#include <doctest.h>

#include <memory>

#include "pebblemark/builders.hpp"
#include "pebblemark/game.hpp"
#include "pebblemark/rand.hpp"

using namespace pebblemark;

namespace {

Bytes seed_of(std::uint64_t n) {
  Bytes b;
  append_u64(b, n);
  return b;
}

GameEnv env_of(const SampledConstruction& c, EvaluatorMode mode) {
  return GameEnv{std::make_shared<DynamicGraphSpec>(c.spec), Oracle(seed_of(77), 32), mode, 0,
                 EvictionPolicy::Lru};
}

}  // namespace

TEST_CASE("wilson interval sanity") {
  WilsonInterval ci = wilson_interval(500, 1000);
  CHECK(ci.low < 0.5);
  CHECK(ci.high > 0.5);
  CHECK(ci.high - ci.low < 0.07);
  WilsonInterval all = wilson_interval(1000, 1000);
  CHECK(all.high == doctest::Approx(1.0));
  CHECK(all.low > 0.99 - 0.01);
  CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
}

TEST_CASE("estimate bounds") {
  AdvantageEstimate est = estimate_from_wins(980, 1000);
  CHECK(est.advantage == doctest::Approx(0.48));
  CHECK(est.adv_ci_low > 0.4);
  CHECK(est.adv_ci_high <= 0.5);
  AdvantageEstimate fair = estimate_from_wins(500, 1000);
  CHECK(fair.adv_ci_low == 0.0);
}

TEST_CASE("builtin attacker catalogue is total") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(1));
  GameEnv env = env_of(f5, EvaluatorMode::Full);
  auto pairs = default_challenge_pairs();
  for (const auto& name : builtin_attackers()) {
    SeededRng rng(seed_of(5));
    auto attacker = attacker_factory(name)(env, rng);
    LeakagePattern lp0 = env.evaluate(pairs[0].first, seed_of(100));
    LeakagePattern lp1 = env.evaluate(pairs[0].second, seed_of(101));
    RoundView view{pairs[0].first, pairs[0].second, &lp0, &lp1};
    attacker->observe(view);
    int g = attacker->guess();
    CHECK((g == 0 || g == 1));
  }
  CHECK_THROWS_AS(attacker_factory("nope"), std::invalid_argument);
}

TEST_CASE("coin flip attacker hovers at one half") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(2));
  GameEnv env = env_of(f5, EvaluatorMode::Full);
  GameConfig config;
  config.trials = 400;
  config.seed = seed_of(3);
  config.jobs = 4;
  auto pairs = default_challenge_pairs();
  AdvantageEstimate est = run_single(env, config, "coin-flip", pairs[0].first, pairs[0].second);
  CHECK(est.advantage < 0.08);
  CHECK(est.adv_ci_low == 0.0);  // the CI contains zero advantage
}

TEST_CASE("simulate-and-match wins the no-shuffle ablation and not the full game") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(4));
  GameConfig config;
  config.trials = 120;
  config.seed = seed_of(5);
  config.jobs = 4;
  auto pairs = default_challenge_pairs();

  GameEnv ablated = env_of(f5, EvaluatorMode::NoShuffle);
  AdvantageEstimate no_shuffle = run_single(ablated, config, "exact-match", pairs[0].first, pairs[0].second);
  CHECK(no_shuffle.advantage > 0.45);

  GameEnv full = env_of(f5, EvaluatorMode::Full);
  AdvantageEstimate with_shuffle = run_single(full, config, "exact-match", pairs[0].first, pairs[0].second);
  CHECK(with_shuffle.advantage < 0.15);
  // ablation ordering with clearly separated intervals
  CHECK(no_shuffle.adv_ci_low > with_shuffle.adv_ci_high);
}

TEST_CASE("run_single rejects equal inputs and bad configs") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(6));
  GameEnv env = env_of(f5, EvaluatorMode::Full);
  GameConfig config;
  config.trials = 1;
  config.seed = seed_of(7);
  Bytes x{1, 2};
  CHECK_THROWS_AS(run_single(env, config, "coin-flip", x, x), std::invalid_argument);
  config.trials = 0;
  auto pairs = default_challenge_pairs();
  CHECK_THROWS_AS(run_single(env, config, "coin-flip", pairs[0].first, pairs[0].second), std::out_of_range);
}

TEST_CASE("games refuse non-amenable specs") {
  SampledConstruction f4 = sample_fig4(16, 0.5, 4, seed_of(8));
  GameEnv env{std::make_shared<DynamicGraphSpec>(f4.spec), Oracle(seed_of(77), 32), EvaluatorMode::Full, 0,
              EvictionPolicy::Lru};
  GameConfig config;
  config.trials = 2;
  config.seed = seed_of(9);
  auto pairs = default_challenge_pairs();
  CHECK_THROWS_AS(run_single(env, config, "coin-flip", pairs[0].first, pairs[0].second),
                  std::invalid_argument);
}

TEST_CASE("adaptive game with one round reduces to the single game shape") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(10));
  GameEnv env = env_of(f5, EvaluatorMode::Full);
  GameConfig config;
  config.trials = 60;
  config.rounds = 1;
  config.seed = seed_of(11);
  config.jobs = 2;
  AdvantageEstimate est = run_adaptive(env, config, "coin-flip");
  CHECK(est.trials == 60);
  CHECK(est.advantage <= 0.5);
}

TEST_CASE("adaptive advantage stays within the single-round budget") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(12));
  GameEnv env = env_of(f5, EvaluatorMode::Full);
  GameConfig single_cfg;
  single_cfg.trials = 150;
  single_cfg.seed = seed_of(13);
  single_cfg.jobs = 4;
  auto pairs = default_challenge_pairs();
  AdvantageEstimate single = run_single(env, single_cfg, "exact-match", pairs[0].first, pairs[0].second);

  GameConfig adaptive_cfg = single_cfg;
  adaptive_cfg.trials = 150;
  adaptive_cfg.rounds = 8;
  AdvantageEstimate adaptive = run_adaptive(env, adaptive_cfg, "exact-match");
  double budget = 8.0 * single.adv_ci_high + (single.adv_ci_high - single.adv_ci_low) +
                  (adaptive.adv_ci_high - adaptive.adv_ci_low);
  CHECK(adaptive.advantage <= doctest::Approx(std::min(0.5, budget)));
}

TEST_CASE("advantage estimate is symmetric under input swap") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(14));
  GameEnv env = env_of(f5, EvaluatorMode::NoShuffle);
  GameConfig config;
  config.trials = 80;
  config.seed = seed_of(15);
  config.jobs = 4;
  auto pairs = default_challenge_pairs();
  AdvantageEstimate ab = run_single(env, config, "exact-match", pairs[0].first, pairs[0].second);
  AdvantageEstimate ba = run_single(env, config, "exact-match", pairs[0].second, pairs[0].first);
  // the attacker identifies the permutation equally well either way
  CHECK(ab.advantage == doctest::Approx(ba.advantage).epsilon(0.15));
}

TEST_CASE("histogram attacker beats the ablation too") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(16));
  GameConfig config;
  config.trials = 80;
  config.seed = seed_of(17);
  config.jobs = 4;
  auto pairs = default_challenge_pairs();
  GameEnv ablated = env_of(f5, EvaluatorMode::NoShuffle);
  AdvantageEstimate est = run_single(ablated, config, "first-access-histogram", pairs[0].first,
                                     pairs[0].second);
  CHECK(est.advantage > 0.3);
  GameEnv full = env_of(f5, EvaluatorMode::Full);
  AdvantageEstimate quiet = run_single(full, config, "first-access-histogram", pairs[0].first,
                                       pairs[0].second);
  CHECK(quiet.advantage < 0.15);
}

TEST_CASE("hybrid evaluator is as quiet as the real one") {
  SampledConstruction f5 = sample_fig5(16, 0.5, 4, seed_of(18));
  GameConfig config;
  config.trials = 100;
  config.seed = seed_of(19);
  config.jobs = 4;
  auto pairs = default_challenge_pairs();
  GameEnv hybrid = env_of(f5, EvaluatorMode::Hybrid);
  AdvantageEstimate est = run_single(hybrid, config, "exact-match", pairs[0].first, pairs[0].second);
  CHECK(est.advantage < 0.15);
}
