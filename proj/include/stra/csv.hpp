#pragma once

#include <cstdio>
#include <string>

namespace stra {

/// Shortest decimal form that round-trips a double exactly.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace stra
