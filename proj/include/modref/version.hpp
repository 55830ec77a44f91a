#pragma once

namespace modref {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace modref
