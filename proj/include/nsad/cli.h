// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage
// error.

#ifndef NSAD_CLI_H_
#define NSAD_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace nsad {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsageError = 2;

// `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsad

#endif  // NSAD_CLI_H_
