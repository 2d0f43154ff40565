#include "speckleloc/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace speckleloc::csv
{

std::string format_real(double v)
{
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string observables(std::span<const ObservableRecord> series)
{
  std::string out(kObservablesHeader);
  out += '\n';
  for (const ObservableRecord& r : series)
  {
    out += std::to_string(r.step);
    for (double v : {r.z, r.norm, r.centroid, r.sqrtVariance, r.participationRatio,
                     r.peakIntensity, r.boundaryLeak})
    {
      out += ',';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

std::string profile(const IntensityProfile& p)
{
  std::string out(kProfileHeader);
  out += '\n';
  for (std::size_t j = 0; j < p.size(); ++j)
  {
    out += format_real(p.x[j]);
    out += ',';
    out += format_real(p.intensity[j]);
    out += ',';
    out += format_real(p.log10Intensity[j]);
    out += '\n';
  }
  return out;
}

std::string potential(const PotentialField& pot)
{
  std::string out(kPotentialHeader);
  out += '\n';
  const auto x = pot.grid->positions();
  for (std::size_t j = 0; j < pot.values.size(); ++j)
  {
    out += format_real(x[j]);
    out += ',';
    out += format_real(pot.values[j]);
    out += '\n';
  }
  return out;
}

std::string log_mean_profile(std::span<const double> x, std::span<const double> meanLog10)
{
  std::string out(kLogMeanHeader);
  out += '\n';
  for (std::size_t j = 0; j < x.size(); ++j)
  {
    out += format_real(x[j]);
    out += ',';
    out += format_real(meanLog10[j]);
    out += '\n';
  }
  return out;
}

std::size_t Table::column(std::string_view name) const
{
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name)
      return i;
  throw std::out_of_range("no column named '" + std::string(name) + "'");
}

std::vector<double> Table::values(std::string_view name) const
{
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows)
    out.push_back(row.at(c));
  return out;
}

namespace
{

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true)
  {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                       : comma - start));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t lineNo)
{
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
    cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
    cell.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw std::runtime_error("line " + std::to_string(lineNo) + ": not a number: '" +
                             std::string(cell) + "'");
  return v;
}

} // namespace

Table parse(std::string_view text)
{
  Table table;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos < text.size())
  {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineNo;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (table.columns.empty())
    {
      for (auto c : cells)
        table.columns.emplace_back(c);
      continue;
    }
    if (cells.size() != table.columns.size())
      throw std::runtime_error("line " + std::to_string(lineNo) + ": expected " +
                               std::to_string(table.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells)
      row.push_back(parse_number(c, lineNo));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty())
    throw std::runtime_error("CSV text has no header");
  return table;
}

IntensityProfile parse_profile(std::string_view text)
{
  const Table t = parse(text);
  return intensity_profile(t.values("x"), t.values("intensity"));
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace speckleloc::csv
