#pragma once

namespace isurf {
inline constexpr const char* kVersion = "0.1.0";
}
