#pragma once

#include <cstdint>
#include <vector>

namespace advrex {

// Counter-based generator: every value is a pure function of
// (seed, stream, key1, key2, counter). Streams never overlap and results do
// not depend on call interleaving, so sharding work across threads cannot
// perturb the numbers any sample sees.
//
// Streams in use:
//   kInit          - network weight initialization, key1 = layer index
//   kShuffle       - minibatch shuffle order, key1 = epoch
//   kAttackRestart - random attack inits, key1 = global sample index,
//                    key2 = restart index
//   kSynthetic     - synthetic dataset generation
class CounterRng {
 public:
  enum Stream : std::uint64_t {
    kInit = 1,
    kShuffle = 2,
    kAttackRestart = 3,
    kSynthetic = 4,
  };

  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t key1 = 0,
             std::uint64_t key2 = 0);

  std::uint64_t next_u64();

  // Uniform in [0,1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (second value cached).
  double normal();

  // Unbiased integer in [0, n), n >= 1.
  std::uint64_t bounded(std::uint64_t n);

  // Deterministic Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace advrex
