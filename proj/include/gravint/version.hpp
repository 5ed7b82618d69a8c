#pragma once

namespace gravint {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gravint
