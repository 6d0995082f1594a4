#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace nrlat {

/// Simulation time in integer ticks.
///
/// One tick is 1/5376 ms: 1/16 of the largest common divisor of every symbol
/// duration in the supported numerologies (1/14, 1/28 ms NCP and 1/48 ms ECP
/// all divide 1/336 ms). Slot, symbol and processing-time arithmetic is exact.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerMs = 5376;
inline constexpr Tick kNever = std::numeric_limits<Tick>::max() / 4;

constexpr double to_ms(Tick t) { return static_cast<double>(t) / static_cast<double>(kTicksPerMs); }

inline Tick from_ms(double ms) { return static_cast<Tick>(std::llround(ms * static_cast<double>(kTicksPerMs))); }

// Floor division for possibly negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace nrlat
