#pragma once

#include "speckleloc/grid.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace speckleloc
{

struct SpeckleConfig
{
  std::size_t nSpikes = 300;
  double spikeStrength = 1.0; ///< V0
  double spikeWidth = 0.1;    ///< sigma
  double spikeExtent = 30.0;  ///< L, spikes are drawn on [-L, L]
  std::uint64_t seed = 0;
};

/// Realized potential V(x_j) plus the spike centres that produced it.
struct PotentialField
{
  GridPtr grid;
  std::vector<double> values;
  std::vector<double> spikePositions;
  std::vector<std::string> warnings;
};

struct LagValue
{
  double lag;
  double c;
};

struct DisorderStats
{
  double meanV = 0.0;
  double avgSpacing = 0.0; ///< D = 2L / S
  double spikeHeight = 0.0;
  std::vector<LagValue> autocorrelation;
};

/// Unit-mass Gaussian spike (sigma sqrt(pi))^-1 exp(-x^2 / sigma^2).
double spike_profile(double x, double sigma);

/// Sum of S Gaussian spikes at i.i.d. uniform positions on [-L, L].
PotentialField generate_potential(const SpeckleConfig& config, const GridPtr& grid);

/// Same superposition with caller-supplied spike centres; the seed is unused.
PotentialField potential_from_positions(const SpeckleConfig& config, const GridPtr& grid,
                                        std::span<const double> positions);

/// Identically zero potential (control runs).
PotentialField zero_potential(const GridPtr& grid);

// Window statistics. All averages run over the grid samples with
// -L <= x_j <= L using equal weights, i.e. the periodic trapezoid rule.

double mean_potential(const PotentialField& pot, double L);
double spike_height(const PotentialField& pot, double L);

/// C(m dx) for m = 0 .. floor(maxLag / dx), truncated-overlap normalization.
std::vector<LagValue> autocorrelation(const PotentialField& pot, double maxLag, double L);

DisorderStats disorder_stats(const PotentialField& pot, const SpeckleConfig& config, double maxLag);

} // namespace speckleloc
