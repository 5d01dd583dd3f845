#pragma once

#include <bit>
#include <cstdint>
#include <limits>

namespace robrisk::detail {

// Order-preserving map from finite doubles to integers; -0.0 and +0.0 share
// a key.
inline std::int64_t double_key(double v) {
    const auto bits = std::bit_cast<std::int64_t>(v);
    return bits >= 0 ? bits : std::numeric_limits<std::int64_t>::min() - bits;
}

inline double key_double(std::int64_t k) {
    return std::bit_cast<double>(k >= 0 ? k : std::numeric_limits<std::int64_t>::min() - k);
}

// Smallest double in (lo, hi] with pred true, given pred(lo) false and
// pred(hi) true and pred monotone. At most 64 evaluations.
template <class Pred>
double first_true(double lo, double hi, Pred&& pred) {
    std::int64_t a = double_key(lo), b = double_key(hi);
    for (auto gap = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a); gap > 1;
         gap = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a)) {
        const std::int64_t mid = a + static_cast<std::int64_t>(gap / 2);
        if (pred(key_double(mid))) b = mid;
        else a = mid;
    }
    return key_double(b);
}

// Largest double in [lo, hi) with pred true, given pred(lo) true and
// pred(hi) false.
template <class Pred>
double last_true(double lo, double hi, Pred&& pred) {
    std::int64_t a = double_key(lo), b = double_key(hi);
    for (auto gap = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a); gap > 1;
         gap = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a)) {
        const std::int64_t mid = a + static_cast<std::int64_t>(gap / 2);
        if (pred(key_double(mid))) a = mid;
        else b = mid;
    }
    return key_double(a);
}

} // namespace robrisk::detail
