#include "pebblemark/memory.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace pebblemark {

std::string to_string(EvictionPolicy p) { return p == EvictionPolicy::Lru ? "lru" : "fifo"; }

EvictionPolicy policy_from_string(const std::string& s) {
  if (s == "lru") return EvictionPolicy::Lru;
  if (s == "fifo") return EvictionPolicy::Fifo;
  throw std::invalid_argument("unknown eviction policy '" + s + "'");
}

std::vector<std::uint64_t> LeakagePattern::projection(bool include_rounds) const {
  std::vector<std::uint64_t> out;
  out.reserve(events_.size() * (include_rounds ? 3 : 2));
  for (const auto& e : events_) {
    out.push_back(e.kind == AccessEvent::Kind::Request ? 0 : 1);
    out.push_back(e.addr);
    if (include_rounds) out.push_back(e.round);
  }
  return out;
}

std::vector<AccessEvent> LeakagePattern::events_in_rounds(std::uint64_t begin, std::uint64_t end) const {
  std::vector<AccessEvent> out;
  for (const auto& e : events_) {
    if (e.round >= begin && e.round < end) out.push_back(e);
  }
  return out;
}

std::string LeakagePattern::serialize() const {
  std::ostringstream out;
  out << "trace v1 " << label_width_ << ' ' << cache_capacity_ << ' ' << to_string(policy_) << '\n';
  for (const auto& e : events_) {
    out << (e.kind == AccessEvent::Kind::Request ? 'R' : 'S') << ' ' << e.addr << ' ' << e.size << ' '
        << e.round << '\n';
  }
  return out.str();
}

LeakagePattern LeakagePattern::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace: empty input");
  std::istringstream head(line);
  std::string magic, version, policy;
  std::uint32_t width = 0;
  std::uint64_t capacity = 0;
  if (!(head >> magic >> version >> width >> capacity >> policy) || magic != "trace" || version != "v1") {
    throw std::invalid_argument("trace: bad header");
  }
  LeakagePattern out(width, capacity, policy_from_string(policy));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    char kind = 0;
    AccessEvent e;
    if (!(ls >> kind >> e.addr >> e.size >> e.round) || (kind != 'R' && kind != 'S')) {
      throw std::invalid_argument("trace: bad event at line " + std::to_string(lineno));
    }
    e.kind = kind == 'R' ? AccessEvent::Kind::Request : AccessEvent::Kind::Store;
    out.push(e);
  }
  return out;
}

TieredMemory::TieredMemory(std::uint64_t cache_capacity, EvictionPolicy policy, std::uint32_t label_width)
    : capacity_(cache_capacity), policy_(policy), width_(label_width),
      pattern_(label_width, cache_capacity, policy) {
  if (capacity_ < 1) throw std::invalid_argument("TieredMemory: capacity >= 1");
  if (width_ < 1) throw std::invalid_argument("TieredMemory: label width >= 1");
}

void TieredMemory::evict_one() {
  auto victim = cache_.end();
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (victim == cache_.end() || it->second.tick < victim->second.tick) victim = it;
  }
  assert(victim != cache_.end());
  if (victim->second.dirty) {
    ram_[victim->first] = std::move(victim->second.label);
    pattern_.push(AccessEvent{AccessEvent::Kind::Store, victim->first, width_, round_});
  }
  cache_.erase(victim);
}

void TieredMemory::install(std::uint64_t addr, Bytes label, bool dirty) {
  while (cache_.size() >= capacity_) evict_one();
  cache_[addr] = Line{std::move(label), dirty, ++tick_};
}

void TieredMemory::check_capacity() const { assert(cache_.size() <= capacity_); }

Bytes TieredMemory::load(std::uint64_t addr) {
  auto it = cache_.find(addr);
  if (it != cache_.end()) {
    if (policy_ == EvictionPolicy::Lru) it->second.tick = ++tick_;
    check_capacity();
    return it->second.label;
  }
  auto ram_it = ram_.find(addr);
  if (ram_it == ram_.end()) {
    throw std::out_of_range("load fault: address " + std::to_string(addr) + " never written");
  }
  pattern_.push(AccessEvent{AccessEvent::Kind::Request, addr, width_, round_});
  Bytes value = ram_it->second;
  install(addr, value, false);
  check_capacity();
  return value;
}

void TieredMemory::store(std::uint64_t addr, Bytes label) {
  if (label.size() != width_) throw std::invalid_argument("store: label width mismatch");
  auto it = cache_.find(addr);
  if (it != cache_.end()) {
    it->second.label = std::move(label);
    it->second.dirty = true;
    if (policy_ == EvictionPolicy::Lru) it->second.tick = ++tick_;
  } else {
    install(addr, std::move(label), true);
  }
  check_capacity();
}

void TieredMemory::flush_block_ascending(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> dirty_addrs;
  for (const auto& [addr, line] : cache_) {
    if (addr >= lo && addr <= hi && line.dirty) dirty_addrs.push_back(addr);
  }
  std::sort(dirty_addrs.begin(), dirty_addrs.end());
  for (std::uint64_t addr : dirty_addrs) {
    auto& line = cache_[addr];
    ram_[addr] = line.label;
    line.dirty = false;
    pattern_.push(AccessEvent{AccessEvent::Kind::Store, addr, width_, round_});
  }
  check_capacity();
}

}  // namespace pebblemark
