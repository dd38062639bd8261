#ifndef PPOCR_CLI_COMMANDS_HPP_
#define PPOCR_CLI_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace ppocr {

// Entry point of the `ppocr` tool. Machine-readable results go to `out`,
// progress and diagnostics to `err`. Returns the process exit status:
// 0 success, 1 runtime failure (divergence, bad checkpoint, I/O), 2 usage
// or validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppocr

#endif  // PPOCR_CLI_COMMANDS_HPP_
