#pragma once

#include <stdexcept>
#include <string>

namespace speckleloc
{

/// Invalid user-supplied configuration (bad sizes, schema violations, ...).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A requested feature is too narrow for the grid to resolve.
class ResolutionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition (mismatched lengths, foreign grids).
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Moments or ratios requested from a field with no intensity.
class UndefinedMomentsError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Not enough tail samples inside the fit window.
class InsufficientTailError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace speckleloc
