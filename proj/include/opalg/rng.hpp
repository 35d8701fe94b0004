#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace opalg {

/// Stable substream seed from a base seed and a stage label (FNV-1a over the label).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h ^ (seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

/// Generator for one trial of one stage; independent of evaluation order.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace opalg
