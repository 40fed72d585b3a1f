#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

// Seeded randomness helpers. mt19937_64 has a standard-defined sequence;
// the distributions here are hand-rolled so that outputs are identical
// across standard library implementations.
namespace birm::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stable per-stage/per-run seed derivation from one root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t s = root ^ (0xA0761D6478BD642Full + stream * 0xE7037ED1A0B428DBull);
  return splitmix64(s);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % n;
}

// 53-bit uniform in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(gen, i)]);
  }
}

}  // namespace birm::rng
