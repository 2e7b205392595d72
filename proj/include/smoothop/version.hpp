#pragma once

namespace smoothop {
inline constexpr const char* kVersion = "0.1.0";
}
