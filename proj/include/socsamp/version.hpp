#pragma once

namespace socsamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace socsamp
