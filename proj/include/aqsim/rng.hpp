#pragma once

#include <cstdint>

namespace aqsim {

// All randomness in the simulator derives from one fixed mixer: the
// SplitMix64 output function (Steele, Lea & Flood 2014). Draws are
// positional (key, index) -> u64, which makes every stream reproducible
// bit-for-bit across platforms, thread counts, and scheduling orders,
// and lets the classical flag engine replay exactly the measurement
// draws recorded in a circuit instance.

inline constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// value i of the stream keyed by `key`
constexpr uint64_t stream_at(uint64_t key, uint64_t i) {
  return mix64(key + (i + 1) * kGolden);
}

// derived seed with domain separation: child streams of (parent, tag, index)
// never collide for distinct tags or indices in practice
constexpr uint64_t chain_seed(uint64_t parent, uint64_t tag, uint64_t index) {
  return mix64(mix64(parent ^ (tag + 1) * kGolden) + (index + 1) * kGolden);
}

// seed-derivation tags (documented so external tools can replay streams)
inline constexpr uint64_t kTagInstance = 1;  // (master_seed, circuit_index)
inline constexpr uint64_t kTagMeasure = 2;   // per-(layer,site) selection draws
inline constexpr uint64_t kTagDressing = 3;  // dressing-angle draws
inline constexpr uint64_t kTagTrajectory = 4;  // (instance_seed, trajectory_index)
inline constexpr uint64_t kTagRealization = 5;  // flags-only realizations
inline constexpr uint64_t kTagTomography = 6;   // shot sampling
inline constexpr uint64_t kTagBootstrap = 7;    // resampling
inline constexpr uint64_t kTagScan = 8;         // p-scan sub-campaigns

// Bernoulli(p) as a 33-bit threshold against the top 32 bits of a draw;
// p=0 never fires, p=1 always fires, quantization error < 2.4e-10.
constexpr uint64_t bernoulli_threshold(double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return 1ull << 32;
  return static_cast<uint64_t>(p * 4294967296.0 + 0.5);
}

constexpr bool bernoulli_from(uint64_t word, uint64_t threshold) {
  return (word >> 32) < threshold;
}

// Sequential counter stream. next_u64() equals stream_at(key, i) for the
// i-th call, so consumers may mix sequential and positional access.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  uint64_t next_u64() { return stream_at(key_, n_++); }

  // uniform in [0, 1)
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(uint64_t threshold) {
    return bernoulli_from(next_u64(), threshold);
  }

  // uniform index in [0, n); bias is O(2^-64)
  uint32_t next_index(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  uint64_t draws_consumed() const { return n_; }

 private:
  uint64_t key_;
  uint64_t n_ = 0;
};

}  // namespace aqsim
