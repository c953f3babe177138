#pragma once

namespace parisian {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace parisian
