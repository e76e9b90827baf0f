#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cclab {

// Exit codes: 0 consistent / success, 1 inconsistent, 2 error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cclab
