#pragma once

#include <charconv>
#include <string>

namespace wavetrack::detail {

// Shortest round-trip representation; locale independent.
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace wavetrack::detail
