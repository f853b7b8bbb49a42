#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace univex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitTolerance = 2;

/// Runs one command. args excludes the program name. Results go to --out (or
/// `out` when absent); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace univex::cli
