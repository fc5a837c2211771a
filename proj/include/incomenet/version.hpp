#pragma once

namespace incomenet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace incomenet
