#pragma once

#include "speckleloc/disorder.hpp"
#include "speckleloc/propagation.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace speckleloc
{

struct GridSpec
{
  std::size_t nPoints = 4096;
  double halfExtent = 30.0;
};

struct InputBeam
{
  double sigma0 = 1.0;
  double center = 0.0;
};

struct OutputSpec
{
  std::string directory = "results";
  bool observables = true;
  bool profiles = true;
  bool potentials = true;
  bool ensemble = true;
};

/// Full run description. Defaults reproduce the reference localization run:
/// 4096 points on [-30, 30), 300 spikes of width 0.1, sigma0 = 1, k = 1,
/// d = dt = 0.01 and 10^4 kicks recorded every 100.
struct ExperimentConfig
{
  GridSpec grid;
  SpeckleConfig speckle; ///< seed field is ignored; see base_seed
  InputBeam inputBeam;
  EvolutionParams evolution;
  std::uint64_t baseSeed = 0;
  std::size_t nRealizations = 1;
  OutputSpec outputs;
  bool disablePotential = false;
  bool allowDtMismatch = false;
};

/// Parses and validates a JSON config document. Missing keys take defaults;
/// unknown keys, wrong types and broken invariants throw ConfigError naming
/// the offending field path. Blank text yields the defaults.
ExperimentConfig load_config(std::string_view document);

/// Checks cross-field invariants (dt == d unless overridden, extents, ...).
void validate(const ExperimentConfig& config);

/// Canonical JSON form, accepted back by load_config.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

} // namespace speckleloc
