#pragma once

#include "speckleloc/disorder.hpp"
#include "speckleloc/observables.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speckleloc::csv
{

/// 17 significant digits, '.' separator, shortest exponent form ("%.17g").
std::string format_real(double v);

inline constexpr std::string_view kObservablesHeader =
  "step,z,norm,centroid,sqrt_variance,participation_ratio,peak_intensity,boundary_leak";
inline constexpr std::string_view kProfileHeader = "x,intensity,log10_intensity";
inline constexpr std::string_view kPotentialHeader = "x,V";
inline constexpr std::string_view kLogMeanHeader = "x,mean_log10_intensity";

std::string observables(std::span<const ObservableRecord> series);
std::string profile(const IntensityProfile& profile);
std::string potential(const PotentialField& pot);
std::string log_mean_profile(std::span<const double> x, std::span<const double> meanLog10);

/// Header plus numeric rows.
struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Column index by name; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> values(std::string_view name) const;
};

/// Parses comma-separated numeric text with a header line.
Table parse(std::string_view text);

/// Reads a `x,intensity[,log10_intensity]` file back into a profile.
IntensityProfile parse_profile(std::string_view text);

std::string read_file(const std::string& path);

} // namespace speckleloc::csv
