#include "speckleloc/propagation.hpp"

#include "speckleloc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace speckleloc
{

namespace
{

std::vector<Complex> drift_factor(const SimulationGrid& grid, double distance, double k)
{
  const auto q = grid.frequencies();
  std::vector<Complex> out(q.size());
  const double prefactor = -distance / (2.0 * k);
  for (std::size_t n = 0; n < q.size(); ++n)
    out[n] = std::polar(1.0, prefactor * q[n] * q[n]);
  return out;
}

void require_same_grid(const SimulationGrid& a, const SimulationGrid& b)
{
  if (!(a == b))
    throw ContractViolation("field and potential live on different grids");
}

} // namespace

void validate(const EvolutionParams& params)
{
  if (!(params.wavenumber > 0.0))
    throw ConfigError("evolution.wavenumber must be positive");
  if (!(params.driftDistance > 0.0))
    throw ConfigError("evolution.drift_distance must be positive");
  if (!std::isfinite(params.dt))
    throw ConfigError("evolution.dt must be finite");
  if (params.kickSign != 1 && params.kickSign != -1)
    throw ConfigError("evolution.kick_sign must be +1 or -1");
  if (!(params.lossPerKick >= 0.0 && params.lossPerKick < 1.0))
    throw ConfigError("evolution.loss_per_kick must lie in [0, 1)");
  if (params.recordStride == 0)
    throw ConfigError("evolution.record_stride must be positive");
}

ComplexField drift(const ComplexField& field, double distance, double k)
{
  if (!(k > 0.0))
    throw ConfigError("drift wavenumber must be positive");
  ComplexField out = field;
  SpectralTransform transform(out.size());
  const auto factor = drift_factor(field.grid(), distance, k);
  auto v = out.values();
  transform.forward(v);
  for (std::size_t n = 0; n < v.size(); ++n)
    v[n] *= factor[n];
  transform.inverse(v);
  return out;
}

ComplexField kick(const ComplexField& field, std::span<const double> phase, double loss)
{
  if (phase.size() != field.size())
    throw ContractViolation("kick phase length does not match field length");
  if (!(loss >= 0.0 && loss < 1.0))
    throw ContractViolation("kick loss must lie in [0, 1)");
  ComplexField out = field;
  const double amplitude = std::sqrt(1.0 - loss);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] *= std::polar(amplitude, phase[j]);
  return out;
}

ComplexField step(const ComplexField& field, const PotentialField& potential,
                  const EvolutionParams& params)
{
  KickDriftMap map(potential, params);
  ComplexField out = field;
  require_same_grid(field.grid(), *potential.grid);
  map.apply(out.values());
  return out;
}

double boundary_leak(const ComplexField& field)
{
  const auto v = field.values();
  const std::size_t band = std::min(field.grid().edgeBandWidth(), v.size() / 2);
  double peak = 0.0;
  double edge = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
  {
    const double I = std::norm(v[j]);
    peak = std::max(peak, I);
    if (j < band || j >= v.size() - band)
      edge = std::max(edge, I);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

KickDriftMap::KickDriftMap(const PotentialField& potential, const EvolutionParams& params) :
  mParams(params),
  mGrid(potential.grid),
  mTransform(potential.grid->size()),
  mKickFactor(potential.grid->size()),
  mDriftFactor(drift_factor(*potential.grid, params.driftDistance, params.wavenumber))
{
  validate(params);
  if (potential.values.size() != mGrid->size())
    throw ContractViolation("potential length does not match its grid");
  const double amplitude = std::sqrt(1.0 - params.lossPerKick);
  const double phaseScale = -static_cast<double>(params.kickSign) * params.dt;
  for (std::size_t j = 0; j < mKickFactor.size(); ++j)
    mKickFactor[j] = std::polar(amplitude, phaseScale * potential.values[j]);
}

void KickDriftMap::apply(std::span<Complex> values)
{
  if (values.size() != mKickFactor.size())
    throw ContractViolation("field length does not match the map's grid");
  for (std::size_t j = 0; j < values.size(); ++j)
    values[j] *= mKickFactor[j];
  mTransform.forward(values);
  for (std::size_t n = 0; n < values.size(); ++n)
    values[n] *= mDriftFactor[n];
  mTransform.inverse(values);
}

EvolveResult KickDriftMap::evolve(ComplexField field, const Observer& observer)
{
  require_same_grid(field.grid(), *mGrid);
  EvolveResult result{std::move(field), std::nullopt};
  const std::size_t total = mParams.kickCount;
  const double d = mParams.driftDistance;

  auto record = [&](std::size_t s) {
    if (!result.boundaryLeakStep && boundary_leak(result.field) > kBoundaryLeakThreshold)
      result.boundaryLeakStep = s;
    if (observer)
      observer(s, static_cast<double>(s) * d, result.field);
  };

  record(0);
  for (std::size_t s = 1; s <= total; ++s)
  {
    apply(result.field.values());
    if (s % mParams.recordStride == 0 || s == total)
      record(s);
  }
  return result;
}

EvolveResult evolve(const ComplexField& field, const PotentialField& potential,
                    const EvolutionParams& params, const Observer& observer)
{
  require_same_grid(field.grid(), *potential.grid);
  KickDriftMap map(potential, params);
  return map.evolve(field, observer);
}

ComplexField analytic_free_gaussian(double sigma0, double k, double z, const GridPtr& grid,
                                    double center)
{
  if (!(sigma0 > 0.0))
    throw ConfigError("analytic Gaussian width must be positive");
  if (!(k > 0.0))
    throw ConfigError("analytic Gaussian wavenumber must be positive");
  const Complex s2(sigma0 * sigma0, z / k);
  const Complex prefactor = std::pow(std::numbers::pi, -0.25) * std::sqrt(sigma0) / std::sqrt(s2);
  ComplexField field(grid);
  const auto x = grid->positions();
  for (std::size_t j = 0; j < field.size(); ++j)
  {
    const double u = x[j] - center;
    field[j] = prefactor * std::exp(-u * u / (2.0 * s2));
  }
  normalize(field);
  return field;
}

double free_gaussian_variance(double sigma0, double k, double z)
{
  const double r = z / (k * sigma0 * sigma0);
  return sigma0 * sigma0 * (1.0 + r * r) / 2.0;
}

} // namespace speckleloc
