#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sirsurv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one command line (without the program name). Data goes to files,
/// summaries to `out`, diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sirsurv::cli
