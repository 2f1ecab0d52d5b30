#pragma once

namespace fpq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fpq
