#pragma once

#include <cstdint>

namespace wpcn {

// splitmix64 over (base, stream, index); used to derive independent,
// reproducible seed streams for channels, phase inits and trials.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (1 + stream) +
                    0xBF58476D1CE4E5B9ULL * (1 + index);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace wpcn
