#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dipe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `dipe` invocation. `args` excludes the program name. Data goes to
/// files or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dipe::cli
