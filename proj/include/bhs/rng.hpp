#pragma once

#include <cstdint>
#include <random>

namespace bhs {

// Deterministic RNG with a draw counter. The counter feeds state fingerprints
// so runs using fresh randomness every round never look like repeated states.
struct Rng {
  std::mt19937_64 eng;
  uint64_t draws = 0;

  explicit Rng(uint64_t seed = 0) : eng(seed) {}

  uint64_t next() {
    ++draws;
    return eng();
  }
  // Modulo reduction; the slight bias is irrelevant here.
  uint64_t below(uint64_t k) { return k ? next() % k : 0; }
  double unit() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
};

} // namespace bhs
