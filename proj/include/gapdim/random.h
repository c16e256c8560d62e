#ifndef GAPDIM_RANDOM_H_
#define GAPDIM_RANDOM_H_

#include <cstdint>

#include "gapdim/rational.h"

namespace gapdim {

// Counter-based SplitMix64 stream.
//
// Word i of the stream for seed s is
//   z = s + 0x9E3779B97F4A7C15 * (i + 1)            (mod 2^64)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   word = z ^ (z >> 31)
// which is exactly the output sequence of the reference SplitMix64 generator
// started from state s. Any word can be computed directly from (s, i).
// Unit draws are (word >> 11) / 2^53, an exact dyadic rational in [0, 1).
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  static uint64_t Word(uint64_t seed, uint64_t index);

  uint64_t NextWord() { return Word(seed_, counter_++); }
  // Exact dyadic in [0, 1) with 53 random bits.
  Rational NextUnit();
  // floor(unit * n) for the next 53-bit unit draw, in [0, n).
  uint64_t NextBelow(uint64_t n);

  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

}  // namespace gapdim

#endif  // GAPDIM_RANDOM_H_
