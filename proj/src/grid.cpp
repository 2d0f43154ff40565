#include "speckleloc/grid.hpp"

#include "speckleloc/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace speckleloc
{

namespace
{
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}
} // namespace

SimulationGrid::SimulationGrid(std::size_t nPoints, double halfExtent) :
  mHalfExtent(halfExtent),
  mDx(2.0 * halfExtent / static_cast<double>(nPoints)),
  mPositions(nPoints),
  mFrequencies(nPoints)
{
  const auto n = static_cast<std::ptrdiff_t>(nPoints);
  const double dq = 2.0 * std::numbers::pi / (static_cast<double>(nPoints) * mDx);
  for (std::ptrdiff_t j = 0; j < n; ++j)
  {
    mPositions[j] = -halfExtent + static_cast<double>(j) * mDx;
    const std::ptrdiff_t m = j < n / 2 ? j : j - n;
    mFrequencies[j] = static_cast<double>(m) * dq;
  }
}

double SimulationGrid::dq() const
{
  return 2.0 * std::numbers::pi / (static_cast<double>(size()) * mDx);
}

std::size_t SimulationGrid::nearestIndex(double x) const
{
  const double j = std::round((x + mHalfExtent) / mDx);
  if (j <= 0.0)
    return 0;
  return std::min(static_cast<std::size_t>(j), size() - 1);
}

std::size_t SimulationGrid::edgeBandWidth() const
{
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(size()))));
}

GridPtr make_grid(std::size_t nPoints, double halfExtent)
{
  if (nPoints < 2 || !std::has_single_bit(nPoints))
    throw ConfigError("grid.n_points must be a power of two >= 2, got " + std::to_string(nPoints));
  if (!(halfExtent > 0.0) || !std::isfinite(halfExtent))
    throw ConfigError("grid.half_extent must be positive and finite, got " + std::to_string(halfExtent));
  return std::make_shared<const SimulationGrid>(nPoints, halfExtent);
}

ComplexField::ComplexField(GridPtr grid) :
  mGrid(std::move(grid)), mValues(mGrid->size())
{}

ComplexField::ComplexField(GridPtr grid, std::vector<Complex> values) :
  mGrid(std::move(grid)), mValues(std::move(values))
{
  if (mValues.size() != mGrid->size())
    throw ContractViolation("field length " + std::to_string(mValues.size()) +
                            " does not match grid size " + std::to_string(mGrid->size()));
}

std::vector<double> ComplexField::intensity() const
{
  std::vector<double> out(mValues.size());
  std::transform(mValues.begin(), mValues.end(), out.begin(),
                 [](const Complex& c) { return std::norm(c); });
  return out;
}

double norm(const ComplexField& field)
{
  double sum = 0.0;
  for (const Complex& c : field.values())
    sum += std::norm(c);
  return std::sqrt(sum * field.grid().dx());
}

void normalize(ComplexField& field)
{
  const double n = norm(field);
  if (!(n > 0.0))
    throw UndefinedMomentsError("cannot normalize a zero field");
  const double scale = 1.0 / n;
  for (Complex& c : field.values())
    c *= scale;
}

ComplexField gaussian_input(const GridPtr& grid, double sigma0, double center)
{
  if (!(sigma0 > 0.0))
    throw ConfigError("input_beam.sigma0 must be positive");
  if (center < -grid->halfExtent() || center >= grid->halfExtent())
    throw ConfigError("input_beam.center lies outside the grid");
  const double resolved = 6.0 * sigma0 / grid->dx();
  if (resolved < 8.0)
    throw ResolutionError("input beam width " + std::to_string(sigma0) +
                          " spans fewer than 8 samples within +-3 sigma0");

  ComplexField field(grid);
  const double amplitude = std::pow(std::numbers::pi * sigma0 * sigma0, -0.25);
  const auto x = grid->positions();
  for (std::size_t j = 0; j < field.size(); ++j)
  {
    const double u = x[j] - center;
    field[j] = amplitude * std::exp(-u * u / (2.0 * sigma0 * sigma0));
  }
  normalize(field);
  return field;
}

SpectralTransform::SpectralTransform(std::size_t n) : mSize(n)
{
  std::vector<Complex> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  mForward = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  mBackward = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralTransform::~SpectralTransform() { release(); }

SpectralTransform::SpectralTransform(SpectralTransform&& other) noexcept :
  mSize(std::exchange(other.mSize, 0)),
  mForward(std::exchange(other.mForward, nullptr)),
  mBackward(std::exchange(other.mBackward, nullptr))
{}

SpectralTransform& SpectralTransform::operator=(SpectralTransform&& other) noexcept
{
  if (this != &other)
  {
    release();
    mSize = std::exchange(other.mSize, 0);
    mForward = std::exchange(other.mForward, nullptr);
    mBackward = std::exchange(other.mBackward, nullptr);
  }
  return *this;
}

void SpectralTransform::release() noexcept
{
  if (!mForward && !mBackward)
    return;
  std::lock_guard lock(planner_mutex());
  if (mForward)
    fftw_destroy_plan(static_cast<fftw_plan>(mForward));
  if (mBackward)
    fftw_destroy_plan(static_cast<fftw_plan>(mBackward));
  mForward = mBackward = nullptr;
}

void SpectralTransform::forward(std::span<Complex> data) const
{
  if (data.size() != mSize)
    throw ContractViolation("transform length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(mForward), buf, buf);
}

void SpectralTransform::inverse(std::span<Complex> data) const
{
  if (data.size() != mSize)
    throw ContractViolation("transform length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(mBackward), buf, buf);
  const double scale = 1.0 / static_cast<double>(mSize);
  for (Complex& c : data)
    c *= scale;
}

} // namespace speckleloc
