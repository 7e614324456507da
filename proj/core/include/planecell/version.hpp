#pragma once

namespace planecell {

inline constexpr const char* kVersion = "0.1.0";

/// Schema tag embedded in every emitted data file.
inline constexpr const char* kSchemaVersion = "planecell/1";

}  // namespace planecell
