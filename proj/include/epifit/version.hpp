#pragma once

namespace epifit {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "epifit";

}  // namespace epifit
