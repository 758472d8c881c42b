#pragma once

namespace coalflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coalflow
