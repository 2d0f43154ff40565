#include "speckleloc/disorder.hpp"

#include "speckleloc/errors.hpp"
#include "speckleloc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace speckleloc
{

namespace
{

// Spike tails beyond 12 sigma are below exp(-144) of the peak.
constexpr double kSpikeCutoff = 12.0;

void validate(const SpeckleConfig& config, const SimulationGrid& grid)
{
  if (!(config.spikeWidth > 0.0))
    throw ConfigError("speckle.spike_width must be positive");
  if (!(config.spikeExtent > 0.0))
    throw ConfigError("speckle.spike_extent must be positive");
  if (config.spikeExtent > grid.halfExtent())
    throw ConfigError("speckle.spike_extent exceeds grid.half_extent");
  if (!std::isfinite(config.spikeStrength))
    throw ConfigError("speckle.spike_strength must be finite");
}

struct Window
{
  std::size_t first = 0;
  std::size_t count = 0;
};

Window window_of(const SimulationGrid& grid, double L)
{
  const auto x = grid.positions();
  const double tol = 1e-9 * grid.dx();
  Window w;
  auto lo = std::find_if(x.begin(), x.end(), [&](double v) { return v >= -L - tol; });
  auto hi = std::find_if(lo, x.end(), [&](double v) { return v > L + tol; });
  w.first = static_cast<std::size_t>(lo - x.begin());
  w.count = static_cast<std::size_t>(hi - lo);
  if (w.count == 0)
    throw ContractViolation("averaging window [-L, L] contains no grid samples");
  return w;
}

double window_mean(std::span<const double> v)
{
  double sum = 0.0;
  for (double x : v)
    sum += x;
  return sum / static_cast<double>(v.size());
}

} // namespace

double spike_profile(double x, double sigma)
{
  return std::exp(-x * x / (sigma * sigma)) / (sigma * std::sqrt(std::numbers::pi));
}

PotentialField potential_from_positions(const SpeckleConfig& config, const GridPtr& grid,
                                        std::span<const double> positions)
{
  validate(config, *grid);

  PotentialField pot;
  pot.grid = grid;
  pot.values.assign(grid->size(), 0.0);
  pot.spikePositions.assign(positions.begin(), positions.end());

  const double sigma = config.spikeWidth;
  const double dx = grid->dx();
  if (sigma < 2.0 * dx)
    pot.warnings.push_back("spike width " + std::to_string(sigma) +
                           " is below 2 dx; spikes are under-resolved");

  const auto x = grid->positions();
  const auto n = static_cast<std::ptrdiff_t>(grid->size());
  for (double centre : positions)
  {
    // Only samples within the cutoff contribute; tails are not wrapped.
    const auto lo = static_cast<std::ptrdiff_t>(
      std::floor((centre - kSpikeCutoff * sigma + grid->halfExtent()) / dx));
    const auto hi = static_cast<std::ptrdiff_t>(
      std::ceil((centre + kSpikeCutoff * sigma + grid->halfExtent()) / dx));
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(lo, 0); j <= std::min(hi, n - 1); ++j)
      pot.values[j] += spike_profile(x[j] - centre, sigma);
  }
  for (double& v : pot.values)
    v *= config.spikeStrength;
  return pot;
}

PotentialField generate_potential(const SpeckleConfig& config, const GridPtr& grid)
{
  validate(config, *grid);
  UniformSource uniform(config.seed);
  std::vector<double> positions(config.nSpikes);
  const double L = config.spikeExtent;
  for (double& p : positions)
    p = -L + 2.0 * L * uniform();
  return potential_from_positions(config, grid, positions);
}

PotentialField zero_potential(const GridPtr& grid)
{
  PotentialField pot;
  pot.grid = grid;
  pot.values.assign(grid->size(), 0.0);
  return pot;
}

double mean_potential(const PotentialField& pot, double L)
{
  const Window w = window_of(*pot.grid, L);
  return window_mean(std::span<const double>(pot.values).subspan(w.first, w.count));
}

double spike_height(const PotentialField& pot, double L)
{
  const Window w = window_of(*pot.grid, L);
  const auto v = std::span<const double>(pot.values).subspan(w.first, w.count);
  const double mean = window_mean(v);
  double sum = 0.0;
  for (double x : v)
    sum += (x - mean) * (x - mean);
  return std::sqrt(sum / static_cast<double>(v.size()));
}

std::vector<LagValue> autocorrelation(const PotentialField& pot, double maxLag, double L)
{
  if (!(maxLag < L))
    throw ContractViolation("autocorrelation max_lag must be smaller than L");
  const Window w = window_of(*pot.grid, L);
  const double dx = pot.grid->dx();
  const auto maxShift = std::min<std::size_t>(static_cast<std::size_t>(std::floor(maxLag / dx + 1e-9)),
                                              w.count - 1);

  std::vector<LagValue> out;
  out.reserve(maxShift + 1);
  const auto v = std::span<const double>(pot.values).subspan(w.first, w.count);
  for (std::size_t m = 0; m <= maxShift; ++m)
  {
    const std::size_t overlap = v.size() - m;
    double product = 0.0;
    double mean = 0.0;
    for (std::size_t j = 0; j < overlap; ++j)
    {
      product += v[j] * v[j + m];
      mean += v[j];
    }
    product /= static_cast<double>(overlap);
    mean /= static_cast<double>(overlap);
    out.push_back({static_cast<double>(m) * dx, product - mean * mean});
  }
  return out;
}

DisorderStats disorder_stats(const PotentialField& pot, const SpeckleConfig& config, double maxLag)
{
  const double L = config.spikeExtent;
  DisorderStats stats;
  stats.meanV = mean_potential(pot, L);
  stats.avgSpacing = config.nSpikes > 0 ? 2.0 * L / static_cast<double>(config.nSpikes)
                                        : std::numeric_limits<double>::infinity();
  stats.spikeHeight = spike_height(pot, L);
  stats.autocorrelation = autocorrelation(pot, maxLag, L);
  return stats;
}

} // namespace speckleloc
