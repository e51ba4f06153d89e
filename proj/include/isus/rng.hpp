#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace isus {

// All randomness in the library flows from one master seed through named
// derivation: hash(master, purpose, indices...) feeds an independent
// mt19937_64 stream. Streams are owned by one task at a time.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose) {
  std::uint64_t s = master ^ detail::fnv1a(purpose);
  return detail::splitmix64(s);
}

template <typename... Ix>
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, Ix... index) {
  std::uint64_t s = master ^ detail::fnv1a(purpose);
  ((s = detail::splitmix64(s) ^ static_cast<std::uint64_t>(index)), ...);
  return detail::splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  template <typename... Ix>
  Rng(std::uint64_t master, std::string_view purpose, Ix... index)
      : engine_(derive_seed(master, purpose, index...)) {}

  // Uniform on [0, 1) with 53 random bits; avoids implementation-defined
  // std::uniform_real_distribution behavior.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace isus
