#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cachekit {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Exit codes: 0 success, 2 domain error, 3 verification failure,
// 4 LP infeasible/unbounded.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace cachekit
