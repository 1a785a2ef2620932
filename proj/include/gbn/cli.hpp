#ifndef GBN_CLI_HPP
#define GBN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gbn::cli {

/// Exit codes: 0 success, 2 input error, 3 mathematical degeneracy.
enum ExitCode : int { kOk = 0, kInputError = 2, kDegenerate = 3 };

/// Runs `gbn <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbn::cli

#endif  // GBN_CLI_HPP
