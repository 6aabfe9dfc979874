#pragma once

#include <cstdint>

namespace ccobj {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// xorshift64* stream, bit-exact on every platform. One instance per
/// independent randomness channel so that adding draws to one channel never
/// shifts another.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    state_ = splitmix64(s);
    if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
  }

  uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  /// Uniform in [lo, hi], both inclusive. The modulo bias is irrelevant at
  /// the span sizes simulated here.
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + next() % (hi - lo + 1); }

  /// Uniform index below n.
  size_t pick(size_t n) { return static_cast<size_t>(next() % n); }

 private:
  uint64_t state_;
};

/// Deterministic child seed for channel `channel` of a root seed.
inline uint64_t seed_split(uint64_t root, uint64_t channel) {
  uint64_t x = root ^ (0x9e3779b97f4a7c15ull * (channel + 1));
  return splitmix64(x);
}

}  // namespace ccobj
