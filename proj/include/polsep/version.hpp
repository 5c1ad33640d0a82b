#pragma once

namespace polsep {

inline constexpr const char* kVersion = "0.1.0";
// Version of the JSON schemas accepted and emitted by the CLI; bumped on any
// incompatible change to an input or output document layout.
inline constexpr int kSchemaVersion = 1;

}  // namespace polsep
