#pragma once

#include "robrisk/errors.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace robrisk::detail {

struct SpecParts {
    std::string name;
    std::optional<double> param;
};

// "name" or "name:value"; the value must be a finite decimal.
inline SpecParts split_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    SpecParts parts;
    parts.name = std::string(spec.substr(0, colon));
    if (colon != std::string_view::npos) {
        const std::string_view text = spec.substr(colon + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
            !std::isfinite(value))
            throw ParseError("bad parameter '" + std::string(text) + "' in '" + std::string(spec) + "'");
        parts.param = value;
    }
    return parts;
}

// Shortest round-trip text of a parameter value.
inline std::string format_param(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace robrisk::detail
