#pragma once

namespace martinet {

inline constexpr const char* version = "0.1.0";

}  // namespace martinet
