#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tricritic {

// All randomness in the project flows through mt19937_64 engines whose seeds
// are derived with splitmix64, so independent streams never share state.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

// FNV-1a, used to turn stream labels into stream ids.
constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  return derive_seed(base, fnv1a(label));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index) {
  return derive_seed(derive_seed(base, label), index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace tricritic
