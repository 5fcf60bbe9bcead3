#pragma once

#include <string>
#include <vector>

namespace spca {

// Exit codes: 0 success (including max-iteration stops), 2 usage or input
// errors, 3 numerical failures.
int cli_run(int argc, const char* const* argv);

// Same, for in-process callers; args excludes the program name.
int cli_run(const std::vector<std::string>& args);

}  // namespace spca
