#pragma once

#include <string>
#include <vector>

namespace ddsc {

/// Command-line entry point (wrapped by the binary's main). Exit codes:
/// 0 completed run, 2 configuration error, 3 warm-start failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace ddsc
