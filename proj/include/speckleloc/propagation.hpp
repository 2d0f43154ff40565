#pragma once

#include "speckleloc/disorder.hpp"
#include "speckleloc/grid.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace speckleloc
{

struct EvolutionParams
{
  double wavenumber = 1.0;      ///< k, plays the role of 1/hbar
  double driftDistance = 0.01;  ///< free path d between reflections
  std::size_t kickCount = 10000;
  double dt = 0.01;             ///< kick phase is -V dt for kickSign = +1
  int kickSign = 1;
  double lossPerKick = 0.0;     ///< intensity fraction absorbed per kick
  std::size_t recordStride = 100;
};

/// Throws ConfigError when a parameter lies outside its domain.
void validate(const EvolutionParams& params);

/// Free-space dispersion: spectral multiplier exp(-i distance q^2 / (2k)).
ComplexField drift(const ComplexField& field, double distance, double k);

/// Phase print with uniform loss: phi_j <- sqrt(1 - loss) e^{i theta_j} phi_j.
ComplexField kick(const ComplexField& field, std::span<const double> phase, double loss);

/// One reflection: kick with theta = -kickSign V dt, then drift by d.
ComplexField step(const ComplexField& field, const PotentialField& potential,
                  const EvolutionParams& params);

/// Called at step 0, every recordStride steps, and at the final step.
using Observer = std::function<void(std::size_t step, double z, const ComplexField& field)>;

struct EvolveResult
{
  ComplexField field;
  /// First observed step at which the outer 5% band exceeded 1e-8 of peak.
  std::optional<std::size_t> boundaryLeakStep;
};

/// Largest intensity in the outer 5% bands divided by the peak intensity.
double boundary_leak(const ComplexField& field);

inline constexpr double kBoundaryLeakThreshold = 1e-8;

/// Reusable kick-drift map with precomputed multipliers and FFT plans.
///
/// One instance owns mutable scratch state and must not be shared between
/// threads; independent evolutions each build their own.
class KickDriftMap
{
public:
  KickDriftMap(const PotentialField& potential, const EvolutionParams& params);

  const EvolutionParams& params() const { return mParams; }

  /// Applies one kick and one drift in place.
  void apply(std::span<Complex> values);

  EvolveResult evolve(ComplexField field, const Observer& observer = {});

private:
  EvolutionParams mParams;
  GridPtr mGrid;
  SpectralTransform mTransform;
  std::vector<Complex> mKickFactor;
  std::vector<Complex> mDriftFactor;
};

/// Applies the kick-drift map params.kickCount times.
EvolveResult evolve(const ComplexField& field, const PotentialField& potential,
                    const EvolutionParams& params, const Observer& observer = {});

/// Closed-form freely spread Gaussian with complex width s^2 = sigma0^2 + i z / k,
/// normalized on the grid.
ComplexField analytic_free_gaussian(double sigma0, double k, double z, const GridPtr& grid,
                                    double center = 0.0);

/// sigma0^2 (1 + (z / (k sigma0^2))^2) / 2
double free_gaussian_variance(double sigma0, double k, double z);

} // namespace speckleloc
