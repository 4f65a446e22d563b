#pragma once

namespace dcb {

inline constexpr const char* kVersion = "dcbank 0.1.0";

}  // namespace dcb
