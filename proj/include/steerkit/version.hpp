#pragma once

namespace steerkit {

inline constexpr const char* version_string = "0.1.0";

}
