#pragma once

namespace hypforge {
inline constexpr const char* kVersion = "0.1.0";
}
