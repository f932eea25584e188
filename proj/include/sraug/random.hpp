#pragma once

#include <cstdint>
#include <random>

namespace sraug {

/// Engine output is fixed by the standard; the conversions below are written
/// out so that draws are identical across standard library implementations.
using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes exactly two engine draws.
double standard_normal(Rng& rng);

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of one augmentation work item. Depends only on its arguments, never on
/// scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t item_index,
                                    std::uint64_t variant) noexcept {
  return mix64(mix64(mix64(master) ^ item_index) ^ (variant * 0xd1b54a32d192ed03ULL));
}

}  // namespace sraug
