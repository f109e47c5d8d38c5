#include "advrex/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace advrex {
namespace {

// splitmix64 finalizer; full-avalanche mixing of one 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
  return mix64(h ^ mix64(w));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, Stream stream, std::uint64_t key1,
                       std::uint64_t key2) {
  std::uint64_t h = mix64(seed);
  h = absorb(h, static_cast<std::uint64_t>(stream));
  h = absorb(h, key1);
  h = absorb(h, key2);
  base_ = h;
}

std::uint64_t CounterRng::next_u64() { return mix64(base_ ^ counter_++); }

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double CounterRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 bounded away from 0 so log() stays finite.
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

std::uint64_t CounterRng::bounded(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("CounterRng::bounded: n must be >= 1");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

}  // namespace advrex
