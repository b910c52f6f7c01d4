#pragma once

namespace nrlink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nrlink
