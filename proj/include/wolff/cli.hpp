#pragma once

#include <string>
#include <vector>

namespace wolff {

// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 verification
// failure (an inequality check exceeded its tolerance).
int dispatch(const std::vector<std::string>& args);

}  // namespace wolff
