#pragma once

namespace wolff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wolff
