#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace antgen {

// 64-bit FNV-1a; used for stable content digests in reports.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t h);

// SplitMix64 step; derives independent stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// seed = splitmix64(master ^ fnv1a64(stream) ^ splitmix64(index))
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
  return splitmix64(master ^ fnv1a64(stream) ^ splitmix64(index));
}

}  // namespace antgen
