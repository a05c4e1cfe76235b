#pragma once

namespace hotplate {

inline constexpr const char* version_string = "0.1.0";

}  // namespace hotplate
