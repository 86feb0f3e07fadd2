#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spinchain {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the stream-th independent chain of an experiment. Depends only on
// (master, stream), so results do not change with the thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform integer in [0, bound). Lemire's multiply-shift with rejection, so the
// result is exactly uniform and portable across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  __uint128_t m = static_cast<__uint128_t>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<__uint128_t>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Hands out the bits of one 64-bit draw at a time.
class BitStream {
 public:
  bool next(Rng& rng) {
    if (left_ == 0) {
      word_ = rng();
      left_ = 64;
    }
    --left_;
    const bool b = word_ & 1U;
    word_ >>= 1;
    return b;
  }

 private:
  std::uint64_t word_ = 0;
  int left_ = 0;
};

// Exp(1) variate.
inline double exponential(Rng& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace spinchain
