#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qslab {

inline constexpr std::uint64_t default_seed = 0xC0FFEE;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of stream `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = default_seed) : seed_(seed), eng_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }
  Rng split(std::string_view name) const { return Rng(derive_seed(seed_, name_hash(name))); }

  // Uniform in [0, m).
  std::size_t below(std::size_t m) {
    if (m <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(m);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  std::mt19937_64& engine() { return eng_; }

 private:
  static std::uint64_t mix(std::uint64_t s) { return splitmix64(s); }
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace qslab
