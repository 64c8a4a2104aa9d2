#pragma once

namespace tsel {
inline constexpr const char* kVersion = "0.1.0";
}
