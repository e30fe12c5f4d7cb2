#include "mokit/ext_real.hpp"

#include <cstdio>

namespace mokit {

std::string ExtReal::to_string() const {
    if (is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v_);
    return buf;
}

}  // namespace mokit
