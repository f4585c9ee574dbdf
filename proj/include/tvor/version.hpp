#pragma once

namespace tvor {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tvor
