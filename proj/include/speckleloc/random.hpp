#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace speckleloc
{

/// Identifier of the position generator, recorded in run manifests.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/uniform53";
/// Identifier of the per-realization seed mixer.
inline constexpr std::string_view kSeedMixAlgorithm = "splitmix64(base_seed + (index+1)*0x9e3779b97f4a7c15)";

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for realization `index` of an ensemble started from `baseSeed`.
constexpr std::uint64_t realization_seed(std::uint64_t baseSeed, std::uint64_t index)
{
  return splitmix64(baseSeed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Uniform doubles on [0, 1) from the top 53 bits of mt19937_64.
///
/// std::uniform_real_distribution is implementation-defined, so the
/// conversion is spelled out to keep potentials identical across toolchains.
class UniformSource
{
public:
  explicit UniformSource(std::uint64_t seed) : mEngine(seed) {}

  double operator()() { return static_cast<double>(mEngine() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 mEngine;
};

} // namespace speckleloc
