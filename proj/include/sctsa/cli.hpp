#pragma once

#include <string>
#include <vector>

namespace sctsa::cli {

// Exit codes: 0 success, 1 internal error, 2 config error, 3 data error,
// 4 budget error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace sctsa::cli
