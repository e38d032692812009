#pragma once

#include <cstdio>
#include <string>

namespace scm {

/// "%.17g" rendering; round-trips every finite double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace scm
