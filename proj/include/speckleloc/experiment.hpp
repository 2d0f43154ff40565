#pragma once

#include "speckleloc/config.hpp"
#include "speckleloc/disorder.hpp"
#include "speckleloc/observables.hpp"
#include "speckleloc/propagation.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace speckleloc
{

/// Environment variable holding the worker-pool size for ensembles.
inline constexpr const char* kWorkersEnv = "SPECKLELOC_WORKERS";

/// Output could not be written; a PARTIAL marker is left in the directory.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RealizationResult
{
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<ObservableRecord> series;
  IntensityProfile finalProfile;
  PotentialField potential;
  std::vector<std::string> warnings;
  double wallSeconds = 0.0;
};

/// Generates the potential (or the zero potential for control runs), evolves
/// the Gaussian input and records observables every record_stride kicks.
/// `extra` is invoked alongside the recorder at every recorded step.
RealizationResult run_realization(const ExperimentConfig& config, std::size_t index,
                                  const Observer& extra = {});

struct RealizationEntry
{
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double wallSeconds = 0.0;
  bool ok = false;
  std::string error;
  std::vector<std::string> warnings;
};

struct RunManifest
{
  nlohmann::ordered_json config;
  std::vector<std::uint64_t> seeds;
  std::string softwareVersion;
  std::string rngAlgorithm;
  std::string seedMixer;
  std::vector<RealizationEntry> realizations;
  /// File name -> SHA-256 hex digest of its bytes.
  std::map<std::string, std::string> digests;

  nlohmann::ordered_json to_json() const;
};

struct EnsembleOptions
{
  /// 0 = read kWorkersEnv, falling back to hardware concurrency.
  std::size_t workers = 0;
};

/// Worker count resolved from options, environment and hardware.
std::size_t resolve_workers(const EnsembleOptions& options);

/// Runs all realizations on a bounded worker pool and writes the artifacts
/// to config.outputs.directory. Aggregation happens in index order once all
/// workers finish, so every data file is independent of the worker count.
/// Failed realizations are recorded in the manifest; the rest continue.
RunManifest run_ensemble(const ExperimentConfig& config, const EnsembleOptions& options = {});

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

} // namespace speckleloc
