#include "gapdim/random.h"

namespace gapdim {

uint64_t CounterRng::Word(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rational CounterRng::NextUnit() { return Rational::Dyadic(NextWord() >> 11, 53); }

uint64_t CounterRng::NextBelow(uint64_t n) {
  const unsigned __int128 bits = NextWord() >> 11;
  return static_cast<uint64_t>((bits * n) >> 53);
}

}  // namespace gapdim
