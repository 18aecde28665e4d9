#ifndef COVPROJ_CLI_HPP
#define COVPROJ_CLI_HPP

#include <string>
#include <vector>

namespace covproj {

// Command-line front end behind the covproj binary. args excludes the
// program name. Returns the process exit code: 0 on success, 1 on
// configuration or usage errors, 2 on numerical failure.
int cli_main(std::vector<std::string> args);

}  // namespace covproj

#endif
