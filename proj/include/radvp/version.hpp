#pragma once

namespace radvp {
inline constexpr const char* kVersion = "0.1.0";
}
