#ifndef VHSIM_SIM_TIME_HPP
#define VHSIM_SIM_TIME_HPP

#include <compare>
#include <cstdint>
#include <cmath>

namespace vhsim {

// Microseconds since scenario start. All module timestamps use this unit.
struct SimTime {
    std::uint64_t us = 0;

    friend auto operator<=>(const SimTime&, const SimTime&) = default;
};

constexpr std::uint64_t kUsPerMs = 1000;
constexpr std::uint64_t kUsPerSec = 1000000;

constexpr SimTime operator+(SimTime t, std::uint64_t delta_us)
{
    return SimTime{t.us + delta_us};
}

// Signed difference a - b in microseconds.
constexpr std::int64_t delta_us(SimTime a, SimTime b)
{
    return static_cast<std::int64_t>(a.us) - static_cast<std::int64_t>(b.us);
}

inline std::uint64_t ms_to_us(double ms)
{
    return static_cast<std::uint64_t>(std::llround(ms * 1000.0));
}

inline std::uint64_t sec_to_us(double s)
{
    return static_cast<std::uint64_t>(std::llround(s * 1e6));
}

constexpr double us_to_ms(std::uint64_t us)
{
    return static_cast<double>(us) / 1000.0;
}

constexpr double us_to_sec(std::uint64_t us)
{
    return static_cast<double>(us) / 1e6;
}

} // namespace vhsim

#endif
