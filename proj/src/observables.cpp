#include "speckleloc/observables.hpp"

#include "speckleloc/errors.hpp"
#include "speckleloc/propagation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace speckleloc
{

Moments moments(std::span<const double> x, std::span<const double> intensity)
{
  if (x.size() != intensity.size())
    throw ContractViolation("moments: position and intensity lengths differ");
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
  {
    mass += intensity[j];
    first += x[j] * intensity[j];
  }
  if (!(mass > 0.0))
    throw UndefinedMomentsError("moments of a field with zero intensity are undefined");
  const double centroid = first / mass;
  double second = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
  {
    const double u = x[j] - centroid;
    second += u * u * intensity[j];
  }
  return {centroid, std::sqrt(std::max(0.0, second / mass))};
}

Moments moments(const ComplexField& field)
{
  const auto I = field.intensity();
  return moments(field.grid().positions(), I);
}

double participation_ratio(const ComplexField& field)
{
  double s2 = 0.0;
  double s4 = 0.0;
  for (const Complex& c : field.values())
  {
    const double I = std::norm(c);
    s2 += I;
    s4 += I * I;
  }
  if (!(s4 > 0.0))
    throw UndefinedMomentsError("participation ratio of a zero field is undefined");
  return s2 * s2 * field.grid().dx() / s4;
}

ObservableRecord observe(const ComplexField& field, std::size_t step, double z)
{
  ObservableRecord r;
  r.step = step;
  r.z = z;
  r.norm = norm(field);
  const Moments m = moments(field);
  r.centroid = m.centroid;
  r.sqrtVariance = m.sqrtVariance;
  r.participationRatio = participation_ratio(field);
  for (const Complex& c : field.values())
    r.peakIntensity = std::max(r.peakIntensity, std::norm(c));
  r.boundaryLeak = boundary_leak(field);
  return r;
}

IntensityProfile intensity_profile(std::vector<double> x, std::vector<double> intensity)
{
  if (x.size() != intensity.size())
    throw ContractViolation("profile: position and intensity lengths differ");
  IntensityProfile p;
  p.x = std::move(x);
  p.intensity = std::move(intensity);
  p.log10Intensity.resize(p.intensity.size());
  for (std::size_t j = 0; j < p.intensity.size(); ++j)
  {
    double I = p.intensity[j];
    if (!(I >= IntensityProfile::kLogFloor))
    {
      p.flooredSamples.push_back(j);
      I = IntensityProfile::kLogFloor;
    }
    p.log10Intensity[j] = std::log10(I);
  }
  return p;
}

IntensityProfile intensity_profile(const ComplexField& field)
{
  const auto x = field.grid().positions();
  return intensity_profile(std::vector<double>(x.begin(), x.end()), field.intensity());
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window)
{
  if (window == 0 || window % 2 == 0)
    throw ContractViolation("moving average window must be odd");
  const std::size_t half = window / 2;
  const std::size_t n = values.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j)
  {
    const std::size_t lo = j >= half ? j - half : 0;
    const std::size_t hi = std::min(n - 1, j + half);
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i)
      sum += values[i];
    out[j] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

LineFit fit_line(std::span<const double> u, std::span<const double> y)
{
  const auto n = static_cast<double>(u.size());
  if (u.size() < 2 || u.size() != y.size())
    throw ContractViolation("line fit needs at least two paired samples");
  double mu = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    mu += u[i];
    my += y[i];
  }
  mu /= n;
  my /= n;
  double suu = 0.0;
  double suy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
  }
  const double slope = suy / suu;
  const double intercept = my - slope * mu;
  double ss = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    const double r = y[i] - (intercept + slope * u[i]);
    ss += r * r;
  }
  return {intercept, slope, std::sqrt(ss / n)};
}

QuadraticFit fit_quadratic(std::span<const double> u, std::span<const double> y)
{
  if (u.size() < 3 || u.size() != y.size())
    throw ContractViolation("quadratic fit needs at least three paired samples");
  // Work in t = (u - m) / s for conditioning.
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double m = 0.5 * (*lo + *hi);
  const double s = std::max(0.5 * (*hi - *lo), std::numeric_limits<double>::min());

  std::array<std::array<double, 4>, 3> a{};
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    const double t = (u[i] - m) / s;
    const std::array<double, 3> basis{1.0, t, t * t};
    for (int r = 0; r < 3; ++r)
    {
      for (int c = 0; c < 3; ++c)
        a[r][c] += basis[r] * basis[c];
      a[r][3] += basis[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col)
  {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
        pivot = r;
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0.0)
      throw ContractViolation("quadratic fit is singular (too few distinct abscissae)");
    for (int r = 0; r < 3; ++r)
    {
      if (r == col)
        continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c)
        a[r][c] -= f * a[col][c];
    }
  }
  const double b0 = a[0][3] / a[0][0];
  const double b1 = a[1][3] / a[1][1];
  const double b2 = a[2][3] / a[2][2];

  QuadraticFit q;
  q.c2 = b2 / (s * s);
  q.c1 = b1 / s - 2.0 * b2 * m / (s * s);
  q.c0 = b0 - b1 * m / s + b2 * m * m / (s * s);
  return q;
}

namespace
{

TailFit fit_side(TailSide side, std::span<const double> x, std::span<const double> lnI,
                 double centroid, double lnLo, double lnHi, std::size_t band,
                 const TailFitOptions& options)
{
  const std::size_t n = x.size();
  auto onSide = [&](std::size_t j) {
    return side == TailSide::right ? x[j] >= centroid : x[j] < centroid;
  };

  // Everything closer than the outermost bright sample belongs to the core.
  double inner = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (onSide(j) && lnI[j] > lnHi)
      inner = std::max(inner, std::abs(x[j] - centroid));

  std::vector<double> u;
  std::vector<double> y;
  for (std::size_t j = band; j + band < n; ++j)
  {
    if (!onSide(j))
      continue;
    const double d = std::abs(x[j] - centroid);
    if (d > inner && lnI[j] >= lnLo && lnI[j] <= lnHi)
    {
      u.push_back(d);
      y.push_back(lnI[j]);
    }
  }
  if (u.size() < std::max<std::size_t>(options.minSamples, 3))
    throw InsufficientTailError(std::string(to_string(side)) + " tail has " +
                                std::to_string(u.size()) + " samples in the fit window, need " +
                                std::to_string(options.minSamples));

  const LineFit line = fit_line(u, y);
  const QuadraticFit quad = fit_quadratic(u, y);

  TailFit fit;
  fit.side = side;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.rmsResidual = line.rmsResidual;
  fit.samples = u.size();
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  fit.windowInner = *lo;
  fit.windowOuter = *hi;
  const double width = *hi - *lo;
  fit.curvatureIndex = line.slope != 0.0 ? std::abs(2.0 * quad.c2 * width) / std::abs(line.slope)
                                         : std::numeric_limits<double>::infinity();
  fit.classification = fit.rmsResidual < options.maxRmsResidual &&
                           fit.curvatureIndex < options.maxCurvatureIndex
                         ? TailClass::exponential
                         : TailClass::nonExponential;
  return fit;
}

} // namespace

std::pair<TailFit, TailFit> fit_tails(const IntensityProfile& profile, const TailFitOptions& options)
{
  const std::size_t n = profile.size();
  if (n == 0)
    throw InsufficientTailError("empty profile");
  if (!(options.relLo > 0.0 && options.relLo < options.relHi))
    throw ConfigError("tail fit window must satisfy 0 < rel_lo < rel_hi");

  const Moments m = moments(profile.x, profile.intensity);
  const double peak = *std::max_element(profile.intensity.begin(), profile.intensity.end());

  std::vector<double> lnI(n);
  for (std::size_t j = 0; j < n; ++j)
    lnI[j] = std::log(std::max(profile.intensity[j], IntensityProfile::kLogFloor));
  if (options.smoothingWindow > 1)
    lnI = moving_average(lnI, options.smoothingWindow);

  const double lnPeak = std::log(peak);
  const double lnLo = lnPeak + std::log(options.relLo);
  const double lnHi = lnPeak + std::log(options.relHi);
  const auto band = static_cast<std::size_t>(std::ceil(options.edgeExclusion * static_cast<double>(n)));

  return {fit_side(TailSide::left, profile.x, lnI, m.centroid, lnLo, lnHi, band, options),
          fit_side(TailSide::right, profile.x, lnI, m.centroid, lnLo, lnHi, band, options)};
}

const char* to_string(TailSide side)
{
  return side == TailSide::left ? "left" : "right";
}

const char* to_string(TailClass cls)
{
  return cls == TailClass::exponential ? "exponential" : "non-exponential";
}

} // namespace speckleloc
