#ifndef BELIEFSCOPE_CLI_HPP
#define BELIEFSCOPE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace beliefscope {

enum ExitCode : int {
    kExitOk = 0,
    kExitInvalid = 1,
    kExitParse = 2,
    kExitImpossible = 3,
    kExitMismatch = 4,
};

inline constexpr double kOracleTolerance = 1e-9;

/// Runs one `beliefscope` command. args excludes the program name. Output
/// documents go to out, diagnostics to err; "-" as a file reads from in.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace beliefscope

#endif // BELIEFSCOPE_CLI_HPP
