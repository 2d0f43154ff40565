#pragma once

#include "speckleloc/grid.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace speckleloc
{

struct ObservableRecord
{
  std::size_t step = 0;
  double z = 0.0;
  double norm = 0.0;
  double centroid = 0.0;
  double sqrtVariance = 0.0;
  double participationRatio = 0.0;
  double peakIntensity = 0.0;
  double boundaryLeak = 0.0;
};

struct Moments
{
  double centroid;
  double sqrtVariance;
};

/// Intensity-weighted centroid and spread. Throws UndefinedMomentsError on a
/// zero field.
Moments moments(const ComplexField& field);
Moments moments(std::span<const double> x, std::span<const double> intensity);

/// (sum I dx)^2 / (sum I^2 dx)
double participation_ratio(const ComplexField& field);

/// All diagnostics of one snapshot.
ObservableRecord observe(const ComplexField& field, std::size_t step, double z);

/// Intensity samples and their floored base-10 logarithm.
struct IntensityProfile
{
  static constexpr double kLogFloor = 1e-300;

  std::vector<double> x;
  std::vector<double> intensity;
  std::vector<double> log10Intensity;
  /// Samples whose intensity was below kLogFloor before taking the log.
  std::vector<std::size_t> flooredSamples;

  std::size_t size() const { return x.size(); }
};

IntensityProfile intensity_profile(const ComplexField& field);
/// Builds a profile from raw samples (used when re-reading CSV files).
IntensityProfile intensity_profile(std::vector<double> x, std::vector<double> intensity);

enum class TailSide
{
  left,
  right
};

enum class TailClass
{
  exponential,
  nonExponential
};

struct TailFit
{
  TailSide side = TailSide::left;
  double slope = 0.0;         ///< d ln I / d|x - centroid|
  double intercept = 0.0;     ///< ln I at |x - centroid| = 0
  double rmsResidual = 0.0;   ///< of the linear fit, in ln units
  /// |2 c W| / |slope| for the quadratic coefficient c over a window of
  /// width W: the fractional change of the local slope across the window.
  double curvatureIndex = 0.0;
  std::size_t samples = 0;
  double windowInner = 0.0;   ///< smallest |x - centroid| used
  double windowOuter = 0.0;   ///< largest |x - centroid| used
  TailClass classification = TailClass::nonExponential;

  /// xi = -2 / slope, from I ~ exp(-2|x|/xi).
  double localizationLength() const { return -2.0 / slope; }
};

struct TailFitOptions
{
  double relLo = 1e-10;
  double relHi = 1e-3;
  double maxRmsResidual = 0.8;
  double maxCurvatureIndex = 0.3;
  std::size_t minSamples = 16;
  double edgeExclusion = 0.05;
  /// Centered moving-average length applied to ln I before fitting; 1 = raw.
  std::size_t smoothingWindow = 1;
};

/// Least-squares line and parabola of ln I against |x - centroid| on each
/// side of the centroid. Per side, the window starts beyond the outermost
/// sample brighter than relHi * peak and keeps samples with
/// relLo <= I / peak <= relHi that are outside the edge bands.
/// Throws InsufficientTailError if either side has fewer than minSamples.
std::pair<TailFit, TailFit> fit_tails(const IntensityProfile& profile,
                                      const TailFitOptions& options = {});

/// Centered moving average (window shrinks at the ends). window must be odd.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

struct LineFit
{
  double intercept;
  double slope;
  double rmsResidual;
};

struct QuadraticFit
{
  double c0;
  double c1;
  double c2;
};

LineFit fit_line(std::span<const double> u, std::span<const double> y);
QuadraticFit fit_quadratic(std::span<const double> u, std::span<const double> y);

const char* to_string(TailSide side);
const char* to_string(TailClass cls);

} // namespace speckleloc
