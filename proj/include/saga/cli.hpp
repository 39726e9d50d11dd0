#ifndef SAGA_CLI_HPP
#define SAGA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace saga {

// Command-line entry, factored out of main() so tests can drive it.
// Exit codes: 0 success without alarms, 1 alarms raised, 2 any error.
int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace saga

#endif
