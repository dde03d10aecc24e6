#pragma once

namespace sodacer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sodacer
