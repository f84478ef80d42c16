#ifndef RADLABEL_CLI_HPP
#define RADLABEL_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace radlabel::cli {

// Full command-line entry point (train / label / evaluate / compare /
// augment / prevalence). Returns the process exit code: 0 success,
// 1 user/config error, 2 internal error. Output goes to the streams so
// tests can run commands in-process.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace radlabel::cli

#endif  // RADLABEL_CLI_HPP
