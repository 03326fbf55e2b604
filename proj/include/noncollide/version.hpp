#pragma once

namespace noncollide {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace noncollide
