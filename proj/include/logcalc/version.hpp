#pragma once

namespace logcalc {

inline constexpr const char* kVersion = "0.1.0";

} // namespace logcalc
