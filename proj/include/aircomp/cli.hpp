#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aircomp {

// Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 validation failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

/// Entry point behind the `aircomp` binary; `args` excludes the program
/// name. Split out so tests can drive the CLI in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aircomp
