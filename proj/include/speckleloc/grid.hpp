#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace speckleloc
{

using Complex = std::complex<double>;

/// Uniform periodic lattice on [-half_extent, +half_extent) together with its
/// conjugate angular-frequency lattice in standard DFT order.
class SimulationGrid
{
public:
  SimulationGrid(std::size_t nPoints, double halfExtent);

  std::size_t size() const { return mPositions.size(); }
  double halfExtent() const { return mHalfExtent; }
  double dx() const { return mDx; }
  /// Spacing of the angular-frequency lattice, 2*pi / (n*dx).
  double dq() const;

  std::span<const double> positions() const { return mPositions; }
  std::span<const double> frequencies() const { return mFrequencies; }

  /// Index of the sample closest to x (clamped to the grid).
  std::size_t nearestIndex(double x) const;

  /// Number of samples in each outer 5% band used for boundary diagnostics.
  std::size_t edgeBandWidth() const;

  bool operator==(const SimulationGrid& other) const
  {
    return size() == other.size() && mHalfExtent == other.mHalfExtent;
  }

private:
  double mHalfExtent;
  double mDx;
  std::vector<double> mPositions;
  std::vector<double> mFrequencies;
};

using GridPtr = std::shared_ptr<const SimulationGrid>;

/// Validating factory; n_points must be a power of two >= 2, extent > 0.
GridPtr make_grid(std::size_t nPoints, double halfExtent);

/// Sampled complex envelope on a grid.
class ComplexField
{
public:
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<Complex> values);

  const SimulationGrid& grid() const { return *mGrid; }
  const GridPtr& gridPtr() const { return mGrid; }

  std::size_t size() const { return mValues.size(); }
  std::span<Complex> values() { return mValues; }
  std::span<const Complex> values() const { return mValues; }
  Complex& operator[](std::size_t i) { return mValues[i]; }
  const Complex& operator[](std::size_t i) const { return mValues[i]; }

  /// |phi_j|^2 for every sample.
  std::vector<double> intensity() const;

private:
  GridPtr mGrid;
  std::vector<Complex> mValues;
};

/// sqrt(sum |phi_j|^2 dx)
double norm(const ComplexField& field);

/// Scales the field in place so that norm() == 1. Throws on a zero field.
void normalize(ComplexField& field);

/// Normalized Gaussian beam (pi sigma0^2)^(-1/4) exp(-(x-c)^2 / (2 sigma0^2)).
ComplexField gaussian_input(const GridPtr& grid, double sigma0, double center);

/// Thin RAII wrapper over FFTW plans for one transform length.
///
/// Forward is unnormalized; inverse carries the 1/n factor, so
/// inverse(forward(f)) == f. Plans are created with FFTW_ESTIMATE which keeps
/// the chosen algorithm, and hence every output bit, independent of timing.
class SpectralTransform
{
public:
  explicit SpectralTransform(std::size_t n);
  ~SpectralTransform();

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;
  SpectralTransform(SpectralTransform&& other) noexcept;
  SpectralTransform& operator=(SpectralTransform&& other) noexcept;

  std::size_t size() const { return mSize; }

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

private:
  void release() noexcept;

  std::size_t mSize = 0;
  void* mForward = nullptr;
  void* mBackward = nullptr;
};

} // namespace speckleloc
