#pragma once

namespace syncstab {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace syncstab
