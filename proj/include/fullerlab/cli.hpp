#pragma once

#include <string>
#include <vector>

namespace fullerlab {

/// Command-line entry point; also driven directly by tests.
/// args excludes the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace fullerlab
