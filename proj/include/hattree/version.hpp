#pragma once

namespace hattree {

inline constexpr const char* kVersion = "hattree 0.1.0";

}  // namespace hattree
