#pragma once

namespace wavicle {

inline constexpr const char* kVersion = "0.1.0";

}
