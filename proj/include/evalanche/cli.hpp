#ifndef EVALANCHE_CLI_HPP
#define EVALANCHE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace evalanche {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`. Returns 0 on success, 1 on usage, config or
/// I/O errors, 2 on numerical or domain errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evalanche

#endif  // EVALANCHE_CLI_HPP
