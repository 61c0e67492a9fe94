#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace prefshare {

// splitmix64 finalizer; good avalanche, used for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over bytes; stable across platforms (std::hash is not).
inline std::uint64_t hash_str(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return mix64(master ^ mix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return mix64(master ^ hash_str(tag));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t n) {
  return mix64(mix64(master ^ hash_str(tag)) ^ n);
}

// Uniform double in [0,1) from a 64-bit hash value (53 mantissa bits).
inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(mix64(seed));
}

}  // namespace prefshare
