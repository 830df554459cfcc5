#pragma once

namespace geotax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace geotax
