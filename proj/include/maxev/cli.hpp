// Command-line front end: run scenarios, query bounds, invoke the exact
// enumeration oracle, and emit machine-readable reports and plot data.
// Exposed as a library entry point so the commands are testable in-process.
#pragma once

#include <string>
#include <vector>

namespace maxev::cli {

// Exit codes: 0 success, 1 configuration/parse error, 2 precondition
// violation, 3 I/O failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace maxev::cli
