#ifndef REPSIM_TOOLS_CLI_HPP
#define REPSIM_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace repsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line (without the program name). Results go to `out`
/// unless an --out path is given; messages and warnings go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repsim::cli

#endif  // REPSIM_TOOLS_CLI_HPP
