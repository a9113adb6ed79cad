#pragma once

namespace lfengine {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lfengine
