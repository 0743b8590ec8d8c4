#pragma once

namespace pslab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pslab
