#ifndef SEMCEPT_RANDOM_HPP
#define SEMCEPT_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace semcept {

// std::mt19937_64 output is fixed by the standard; the distributions in <random> are not.
// All draws go through the mappings below so that seeded runs are identical across
// standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent stream seed from a run seed and a key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key, std::uint64_t salt = 0) {
  return splitmix64(splitmix64(seed ^ fnv1a64(key)) + salt);
}

}  // namespace semcept

#endif  // SEMCEPT_RANDOM_HPP
