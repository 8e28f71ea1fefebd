#pragma once

namespace twrn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace twrn
