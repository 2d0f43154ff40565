#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace speckleloc
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfigError = 1,
  kExitRuntimeError = 2,
};

/// Entry point of the `speckleloc` command; args exclude the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace speckleloc
