#pragma once

namespace mmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mmc
