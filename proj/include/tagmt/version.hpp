#pragma once

namespace tagmt {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tagmt
