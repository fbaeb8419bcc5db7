#pragma once

namespace scriptclique {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "scriptclique";

inline const char* tool_id() { return "scriptclique 0.1.0"; }

} // namespace scriptclique
