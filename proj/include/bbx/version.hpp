#pragma once

namespace bbx {

inline constexpr const char* kVersion = "0.1.0";

// Tag on the first line of every canonical CSV track file.
inline constexpr const char* kFormatMagic = "#BBX1";
inline constexpr const char* kFormatVersion = "1";

}  // namespace bbx
