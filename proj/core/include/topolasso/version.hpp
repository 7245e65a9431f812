#pragma once

namespace topolasso {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace topolasso
