#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace padyn {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;   // a mathematical check failed
inline constexpr int kExitError = 2;  // usage error or precision exhausted

/// Runs one padyn command. args excludes the program name. The report goes to
/// out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padyn
