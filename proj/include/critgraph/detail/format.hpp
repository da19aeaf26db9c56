#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>
#include <system_error>

#include "critgraph/errors.hpp"

namespace critgraph::detail {

/// Locale-independent decimal with `digits` significant digits ('.' separator).
inline std::string format_real(double value, int digits = 12) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, digits);
    return std::string(buffer, result.ptr);
}

inline double parse_real(std::string_view text) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw format_error("not a real number: '" + std::string(text) + "'");
    }
    return value;
}

inline long long parse_integer(std::string_view text) {
    long long value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw format_error("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

} // namespace critgraph::detail
