#pragma once

namespace collatz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace collatz
