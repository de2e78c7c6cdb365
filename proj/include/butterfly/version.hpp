#pragma once

namespace bfm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bfm
