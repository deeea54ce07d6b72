#include "pebblemark/rand.hpp"

#include <stdexcept>

namespace pebblemark {

static std::mt19937_64 engine_from_bytes(std::span<const std::uint8_t> seed) {
  auto digest = sha256(seed);
  std::seed_seq seq(digest.begin(), digest.end());
  return std::mt19937_64(seq);
}

SeededRng::SeededRng(std::span<const std::uint8_t> seed) : engine_(engine_from_bytes(seed)) {}

SeededRng::SeededRng(std::uint64_t seed) {
  Bytes buf;
  append_u64(buf, seed);
  engine_ = engine_from_bytes(buf);
}

std::uint64_t SeededRng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("SeededRng::uniform: empty range");
  // uniform_int_distribution is not portable across standard libraries;
  // rejection sampling on the raw stream is.
  std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return engine_();
  std::uint64_t bound = span + 1;
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return lo + draw % bound;
}

double SeededRng::uniform_real() {
  return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
}

Bytes SeededRng::bytes(std::size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    std::uint64_t word = engine_();
    for (int i = 0; i < 8 && out.size() < n; ++i) {
      out.push_back(static_cast<std::uint8_t>(word >> (56 - 8 * i)));
    }
  }
  return out;
}

Bytes derive_seed(std::span<const std::uint8_t> seed, const std::string& tag, std::uint64_t index) {
  Bytes buf(seed.begin(), seed.end());
  buf.insert(buf.end(), tag.begin(), tag.end());
  append_u64(buf, index);
  auto digest = sha256(buf);
  return Bytes(digest.begin(), digest.end());
}

}  // namespace pebblemark
