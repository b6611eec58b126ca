#pragma once

namespace qdyn {

inline constexpr const char* kToolName = "qdyn";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace qdyn
