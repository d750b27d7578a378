#pragma once

namespace lagsym {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lagsym
