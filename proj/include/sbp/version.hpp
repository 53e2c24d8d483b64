#pragma once

namespace sbp {

inline constexpr const char* version = "0.1.0";

}  // namespace sbp
