#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace signalkit {

// Runs one CLI invocation (arguments exclude the program name). Reports go to
// `out` or --out, one-line summaries to `err`.
// Exit codes: 0 success, 1 contract violation or bad input document, 2 usage.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace signalkit
