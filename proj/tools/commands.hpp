#pragma once

#include <string>
#include <vector>

namespace vaq::cli {

// Exit codes: 0 success, 2 usage error, 3 data/config error, 4 internal
// invariant violation.
int run_cli(const std::vector<std::string> &args);

}  // namespace vaq::cli
