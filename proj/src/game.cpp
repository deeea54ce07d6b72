#include "pebblemark/game.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <set>

namespace pebblemark {

std::string to_string(EvaluatorMode m) {
  switch (m) {
    case EvaluatorMode::Full: return "full";
    case EvaluatorMode::Hybrid: return "hybrid";
    case EvaluatorMode::NoShuffle: return "noshuffle";
  }
  return "full";
}

EvaluatorMode evaluator_mode_from_string(const std::string& s) {
  if (s == "full") return EvaluatorMode::Full;
  if (s == "hybrid") return EvaluatorMode::Hybrid;
  if (s == "noshuffle") return EvaluatorMode::NoShuffle;
  throw std::invalid_argument("unknown evaluator mode '" + s + "'");
}

LeakagePattern GameEnv::evaluate(std::span<const std::uint8_t> x, std::span<const std::uint8_t> coins) const {
  std::uint64_t capacity = cache_capacity ? cache_capacity : required_cache_capacity(*spec);
  TieredMemory mem(capacity, policy, oracle.width());
  EvalOptions options;
  options.skip_amenability_check = true;  // validated once by the harness
  switch (evaluator) {
    case EvaluatorMode::Full:
      break;
    case EvaluatorMode::Hybrid:
      options.family = PermFamily::TrulyRandom;
      break;
    case EvaluatorMode::NoShuffle:
      options.shuffle = false;
      break;
  }
  return mhf_eval(*spec, oracle, x, coins, mem, options).leakage;
}

AdvantageEstimate estimate_from_wins(std::uint64_t wins, std::uint64_t trials, std::uint64_t timeouts) {
  AdvantageEstimate est;
  est.wins = wins;
  est.trials = trials;
  est.timeouts = timeouts;
  est.win_rate = trials ? static_cast<double>(wins) / trials : 0.0;
  est.advantage = std::abs(est.win_rate - 0.5);
  est.win_ci = wilson_interval(wins, trials);
  est.adv_ci_high = std::max(std::abs(est.win_ci.low - 0.5), std::abs(est.win_ci.high - 0.5));
  est.adv_ci_low = (est.win_ci.low <= 0.5 && 0.5 <= est.win_ci.high)
                       ? 0.0
                       : std::min(std::abs(est.win_ci.low - 0.5), std::abs(est.win_ci.high - 0.5));
  return est;
}

// --- attackers ------------------------------------------------------------------

namespace {

// Flat feature = the attacker-visible address sequence without rounds.
std::vector<std::uint64_t> address_feature(const LeakagePattern& lp) { return lp.projection(false); }

double sequence_similarity(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return a.size() == b.size() ? 1.0 : 0.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i) same += a[i] == b[i];
  return static_cast<double>(same) / std::max(a.size(), b.size());
}

class CoinFlipAttacker : public Attacker {
 public:
  explicit CoinFlipAttacker(SeededRng& rng) : rng_(rng.engine()()) {}
  void observe(const RoundView&) override {}
  std::pair<Bytes, Bytes> next_pair(std::uint32_t round_index) override {
    auto pairs = default_challenge_pairs();
    return pairs[round_index % pairs.size()];
  }
  int guess() override { return static_cast<int>(rng_.below(2)); }

 private:
  SeededRng rng_;
};

}  // namespace

std::vector<std::pair<Bytes, Bytes>> default_challenge_pairs(std::size_t input_len) {
  Bytes zeros(input_len, 0x00);
  Bytes ones(input_len, 0xff);
  Bytes one_bit = zeros;
  one_bit[0] = 0x01;
  Bytes last_bit = zeros;
  last_bit[input_len - 1] = 0x80;
  return {{zeros, ones}, {zeros, one_bit}, {one_bit, last_bit}, {ones, last_bit}};
}

std::vector<std::string> builtin_attackers() {
  return {"coin-flip", "exact-match", "first-access-histogram", "collision-position"};
}

namespace {

// Exact/approximate sequence matcher: replay with constant coins, compare raw
// address sequences.
class ExactMatchAttacker : public Attacker {
 public:
  ExactMatchAttacker(const GameEnv& env, SeededRng& rng) : env_(env), rng_(rng.engine()()) {}

  void observe(const RoundView& round) override {
    const auto& r0 = replay(round.x0);
    const auto& r1 = replay(round.x1);
    auto f_first = address_feature(*round.lp_first);
    auto f_second = address_feature(*round.lp_second);
    double s0 = sequence_similarity(f_first, r0) + sequence_similarity(f_second, r1);
    double s1 = sequence_similarity(f_first, r1) + sequence_similarity(f_second, r0);
    if (s0 > s1) votes_ += 1;
    if (s1 > s0) votes_ -= 1;
  }

  std::pair<Bytes, Bytes> next_pair(std::uint32_t i) override {
    auto pairs = default_challenge_pairs();
    return pairs[i % pairs.size()];
  }

  int guess() override {
    if (votes_ > 0) return 0;
    if (votes_ < 0) return 1;
    return static_cast<int>(rng_.below(2));
  }

 private:
  const std::vector<std::uint64_t>& replay(const Bytes& x) {
    auto key = to_hex(x);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Bytes coins(32, 0);  // fixed public coins: the all-zero "identity" key
      it = cache_.emplace(key, address_feature(env_.evaluate(x, coins))).first;
    }
    return it->second;
  }

  const GameEnv& env_;
  SeededRng rng_;
  int votes_ = 0;
  std::map<std::string, std::vector<std::uint64_t>> cache_;
};

// Per-block first-request offsets within the suffix walk; content-free under a
// random key, input-determined without shuffling.
std::vector<std::uint64_t> first_access_histogram(const GameEnv& env, const LeakagePattern& lp) {
  SuffixGroups groups = derive_suffix_groups(*env.spec);
  std::uint32_t block_size = env.spec->k();
  std::vector<std::uint64_t> first(groups.n_groups, 0);
  std::vector<std::uint8_t> seen(groups.n_groups, 0);
  for (const auto& e : lp.events()) {
    if (e.kind != AccessEvent::Kind::Request) continue;
    for (std::uint32_t j = 0; j < groups.n_groups; ++j) {
      NodeId base = groups.group_parents[j].front();
      if (e.addr >= base && e.addr < base + block_size && !seen[j]) {
        // offset of the first touched slot in block j
        first[j] = e.addr - base;
        seen[j] = 1;
      }
    }
  }
  return first;
}

class HistogramAttacker : public Attacker {
 public:
  HistogramAttacker(const GameEnv& env, SeededRng& rng) : env_(env), rng_(rng.engine()()) {}

  void observe(const RoundView& round) override {
    auto h_first = first_access_histogram(env_, *round.lp_first);
    auto h_second = first_access_histogram(env_, *round.lp_second);
    auto r0 = replay(round.x0);
    auto r1 = replay(round.x1);
    double s0 = match(h_first, r0) + match(h_second, r1);
    double s1 = match(h_first, r1) + match(h_second, r0);
    if (s0 > s1) votes_ += 1;
    if (s1 > s0) votes_ -= 1;
  }

  std::pair<Bytes, Bytes> next_pair(std::uint32_t i) override {
    auto pairs = default_challenge_pairs();
    return pairs[i % pairs.size()];
  }

  int guess() override {
    if (votes_ > 0) return 0;
    if (votes_ < 0) return 1;
    return static_cast<int>(rng_.below(2));
  }

 private:
  static double match(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t same = 0;
    for (std::size_t i = 0; i < n; ++i) same += a[i] == b[i];
    return n ? static_cast<double>(same) / n : 0.0;
  }

  std::vector<std::uint64_t> replay(const Bytes& x) {
    auto key = to_hex(x);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Bytes coins(32, 0);
      it = cache_.emplace(key, first_access_histogram(env_, env_.evaluate(x, coins))).first;
    }
    return it->second;
  }

  const GameEnv& env_;
  SeededRng rng_;
  int votes_ = 0;
  std::map<std::string, std::vector<std::uint64_t>> cache_;
};

// Positions (event indices) at which an address repeats for the first time;
// sensitive to resolver collisions.
std::vector<std::uint64_t> collision_positions(const LeakagePattern& lp) {
  std::set<std::uint64_t> seen;
  std::vector<std::uint64_t> positions;
  std::uint64_t idx = 0;
  for (const auto& e : lp.events()) {
    if (e.kind == AccessEvent::Kind::Request) {
      if (!seen.insert(e.addr).second) positions.push_back(idx);
    }
    ++idx;
  }
  return positions;
}

class CollisionPositionAttacker : public Attacker {
 public:
  CollisionPositionAttacker(const GameEnv& env, SeededRng& rng) : env_(env), rng_(rng.engine()()) {}

  void observe(const RoundView& round) override {
    auto c_first = collision_positions(*round.lp_first);
    auto c_second = collision_positions(*round.lp_second);
    auto r0 = replay(round.x0);
    auto r1 = replay(round.x1);
    double s0 = (c_first == r0) + (c_second == r1);
    double s1 = (c_first == r1) + (c_second == r0);
    if (s0 > s1) votes_ += 1;
    if (s1 > s0) votes_ -= 1;
  }

  std::pair<Bytes, Bytes> next_pair(std::uint32_t i) override {
    auto pairs = default_challenge_pairs();
    return pairs[i % pairs.size()];
  }

  int guess() override {
    if (votes_ > 0) return 0;
    if (votes_ < 0) return 1;
    return static_cast<int>(rng_.below(2));
  }

 private:
  std::vector<std::uint64_t> replay(const Bytes& x) {
    auto key = to_hex(x);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Bytes coins(32, 0);
      it = cache_.emplace(key, collision_positions(env_.evaluate(x, coins))).first;
    }
    return it->second;
  }

  const GameEnv& env_;
  SeededRng rng_;
  int votes_ = 0;
  std::map<std::string, std::vector<std::uint64_t>> cache_;
};

}  // namespace

AttackerFactory attacker_factory(const std::string& name) {
  if (name == "coin-flip") {
    return [](const GameEnv&, SeededRng& rng) { return std::make_unique<CoinFlipAttacker>(rng); };
  }
  if (name == "exact-match") {
    return [](const GameEnv& env, SeededRng& rng) { return std::make_unique<ExactMatchAttacker>(env, rng); };
  }
  if (name == "first-access-histogram") {
    return [](const GameEnv& env, SeededRng& rng) { return std::make_unique<HistogramAttacker>(env, rng); };
  }
  if (name == "collision-position") {
    return [](const GameEnv& env, SeededRng& rng) {
      return std::make_unique<CollisionPositionAttacker>(env, rng);
    };
  }
  throw std::invalid_argument("unknown attacker '" + name + "'");
}

// --- the games ---------------------------------------------------------------------

namespace {

struct TrialOutcome {
  bool win = false;
  bool timeout = false;
  std::vector<std::string> coin_log;
};

TrialOutcome play_one_game(const GameEnv& env, const GameConfig& config, const AttackerFactory& factory,
                           std::uint32_t trial_index, std::optional<std::pair<Bytes, Bytes>> fixed_pair) {
  TrialOutcome out;
  SeededRng trial_rng(derive_seed(config.seed, "trial", trial_index));
  SeededRng attacker_rng(derive_seed(config.seed, "attacker", trial_index));
  auto attacker = factory(env, attacker_rng);
  int b = static_cast<int>(trial_rng.below(2));
  std::size_t coin_len = std::max<std::uint32_t>(1, config.lambda_bits / 8);

  auto deadline_start = std::chrono::steady_clock::now();
  std::pair<Bytes, Bytes> pair;
  try {
    for (std::uint32_t round = 0; round < config.rounds; ++round) {
      if (fixed_pair) {
        pair = *fixed_pair;
      } else {
        pair = attacker->next_pair(round);
      }
      Bytes coins0 = trial_rng.bytes(coin_len);
      Bytes coins1 = trial_rng.bytes(coin_len);
      out.coin_log.push_back(to_hex(coins0));
      out.coin_log.push_back(to_hex(coins1));
      LeakagePattern lp0 = env.evaluate(pair.first, coins0);
      LeakagePattern lp1 = env.evaluate(pair.second, coins1);
      RoundView view;
      view.x0 = pair.first;
      view.x1 = pair.second;
      view.lp_first = b == 0 ? &lp0 : &lp1;
      view.lp_second = b == 0 ? &lp1 : &lp0;
      attacker->observe(view);
    }
    int guess = attacker->guess();
    if (config.attacker_budget_ms > 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                           deadline_start)
                         .count();
      if (static_cast<std::uint64_t>(elapsed) > config.attacker_budget_ms) {
        out.timeout = true;
        return out;
      }
    }
    out.win = guess == b;
  } catch (const std::exception&) {
    out.timeout = true;  // aborts count as losses
  }
  return out;
}

AdvantageEstimate run_games(const GameEnv& env, const GameConfig& config, const std::string& attacker_name,
                            std::optional<std::pair<Bytes, Bytes>> fixed_pair) {
  if (config.trials < 1) throw std::out_of_range("game: trials >= 1");
  if (config.rounds < 1) throw std::out_of_range("game: rounds >= 1");
  AmenabilityReport rep = check_amenable(*env.spec);
  if (!rep.pass) throw std::invalid_argument("game: spec is not amenable to shuffling");
  AttackerFactory factory = attacker_factory(attacker_name);

  std::vector<TrialOutcome> outcomes(config.trials);
  auto run_trial = [&](std::uint32_t t) { outcomes[t] = play_one_game(env, config, factory, t, fixed_pair); };
  if (config.jobs <= 1) {
    for (std::uint32_t t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::atomic<std::uint32_t> next{0};
    std::vector<std::future<void>> futures;
    for (std::uint32_t j = 0; j < config.jobs; ++j) {
      futures.push_back(std::async(std::launch::async, [&]() {
        while (true) {
          std::uint32_t t = next.fetch_add(1);
          if (t >= config.trials) return;
          run_trial(t);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  // The challenger never reuses coins across trials.
  std::set<std::string> coin_set;
  std::uint64_t coins_total = 0;
  std::uint64_t wins = 0, timeouts = 0;
  for (const auto& o : outcomes) {
    wins += o.win;
    timeouts += o.timeout;
    for (const auto& c : o.coin_log) {
      coin_set.insert(c);
      ++coins_total;
    }
  }
  if (coin_set.size() != coins_total) throw std::logic_error("game: challenge coins were reused");
  return estimate_from_wins(wins, config.trials, timeouts);
}

}  // namespace

AdvantageEstimate run_single(const GameEnv& env, const GameConfig& config, const std::string& attacker,
                             const Bytes& x0, const Bytes& x1) {
  if (x0 == x1) throw std::invalid_argument("run_single: challenge inputs must differ");
  GameConfig cfg = config;
  cfg.rounds = 1;
  return run_games(env, cfg, attacker, std::make_pair(x0, x1));
}

AdvantageEstimate run_adaptive(const GameEnv& env, const GameConfig& config, const std::string& attacker) {
  return run_games(env, config, attacker, std::nullopt);
}

}  // namespace pebblemark
