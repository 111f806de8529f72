#pragma once

namespace wrsync {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kScenarioSchema = 1;

}  // namespace wrsync
