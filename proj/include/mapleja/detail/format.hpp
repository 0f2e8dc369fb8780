#pragma once

#include <cstdio>
#include <string>

namespace mapleja::detail {

/// Round-trip decimal form (17 significant digits) used by every CSV writer.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace mapleja::detail
