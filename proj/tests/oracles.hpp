#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the FFT path or the library's spike/propagation code.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle
{

using cplx = std::complex<double>;

/// O(n^2) DFT: X_m = sum_j x_j exp(sign * 2 pi i j m / n). No normalization.
inline std::vector<cplx> dft(const std::vector<cplx>& x, int sign)
{
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t m = 0; m < n; ++m)
  {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((j * m) % n) /
                           static_cast<double>(n);
      acc += x[j] * cplx(std::cos(angle), std::sin(angle));
    }
    out[m] = acc;
  }
  return out;
}

/// Composite trapezoid rule with `panels` panels.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t panels)
{
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < panels; ++i)
    sum += f(a + static_cast<double>(i) * h);
  return sum * h;
}

/// Direct spike sum over every spike and every sample.
inline std::vector<double> spike_sum(const std::vector<double>& x, const std::vector<double>& centres,
                                     double strength, double sigma)
{
  std::vector<double> v(x.size(), 0.0);
  const double norm = 1.0 / (sigma * std::sqrt(std::numbers::pi));
  for (std::size_t j = 0; j < x.size(); ++j)
  {
    double acc = 0.0;
    for (double c : centres)
      acc += norm * std::exp(-(x[j] - c) * (x[j] - c) / (sigma * sigma));
    v[j] = strength * acc;
  }
  return v;
}

/// Kick-then-drift map evaluated with explicit DFT sums and explicit
/// per-sample phase factors. Frequencies are built from the signed index.
inline std::vector<cplx> kick_drift(std::vector<cplx> field, const std::vector<double>& potential,
                                    double halfExtent, double k, double d, double dt, int kickSign,
                                    std::size_t steps)
{
  const std::size_t n = field.size();
  const double dx = 2.0 * halfExtent / static_cast<double>(n);
  for (std::size_t s = 0; s < steps; ++s)
  {
    for (std::size_t j = 0; j < n; ++j)
    {
      const double theta = -kickSign * potential[j] * dt;
      field[j] *= cplx(std::cos(theta), std::sin(theta));
    }
    auto spectrum = dft(field, -1);
    for (std::size_t m = 0; m < n; ++m)
    {
      const long signedIndex = m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
      const double q = 2.0 * std::numbers::pi * static_cast<double>(signedIndex) / (static_cast<double>(n) * dx);
      const double phase = -d * q * q / (2.0 * k);
      spectrum[m] *= cplx(std::cos(phase), std::sin(phase));
    }
    field = dft(spectrum, +1);
    for (cplx& c : field)
      c /= static_cast<double>(n);
  }
  return field;
}

/// Second central moment of exp(-(x-c)^2/sigma0^2)/(sqrt(pi) sigma0) by a
/// fine trapezoid rule over +-12 sigma0.
inline double gaussian_intensity_variance(double sigma0)
{
  auto I = [&](double x) { return std::exp(-x * x / (sigma0 * sigma0)) / (std::sqrt(std::numbers::pi) * sigma0); };
  const double a = -12.0 * sigma0;
  const double b = 12.0 * sigma0;
  const double mass = trapezoid(I, a, b, 200000);
  return trapezoid([&](double x) { return x * x * I(x); }, a, b, 200000) / mass;
}

/// 1 / integral I^2 for the same Gaussian intensity, by trapezoid.
inline double gaussian_participation_ratio(double sigma0)
{
  auto I2 = [&](double x) {
    const double I = std::exp(-x * x / (sigma0 * sigma0)) / (std::sqrt(std::numbers::pi) * sigma0);
    return I * I;
  };
  return 1.0 / trapezoid(I2, -12.0 * sigma0, 12.0 * sigma0, 200000);
}

} // namespace oracle
