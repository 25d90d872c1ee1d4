#pragma once

namespace coe {

inline const char* version_string() { return "0.1.0"; }

} // namespace coe
