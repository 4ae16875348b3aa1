#ifndef QROT_CLI_H_
#define QROT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace qrot {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitRejected = 3;

// Runs `qrot <args...>`; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace qrot

#endif  // QROT_CLI_H_
