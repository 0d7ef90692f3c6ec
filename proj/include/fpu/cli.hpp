#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpu {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
// A `validate` check failed, or a computation could not reach its tolerance.
inline constexpr int kExitValidation = 2;

// args excludes the program name. Writes <output_dir>/<subcommand>.csv and
// .json (plus companion CSVs for some subcommands) and echoes the JSON to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpu
