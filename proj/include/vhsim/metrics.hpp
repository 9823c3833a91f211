#ifndef VHSIM_METRICS_HPP
#define VHSIM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "vhsim/sim_time.hpp"

namespace vhsim {

// Interarrival jitter, RTP style: J += (|D| - J)/16 where D is the change
// in one-way transit time between consecutive packets. The first packet
// only seeds the previous transit.
class JitterEstimator {
public:
    void update(SimTime send_time, SimTime recv_time);
    double jitter_us() const { return j_us_; }
    double max_jitter_us() const { return max_us_; }
    std::uint64_t samples() const { return samples_; }

private:
    double j_us_ = 0.0;
    double max_us_ = 0.0;
    std::uint64_t samples_ = 0;
    std::optional<std::int64_t> prev_transit_us_;
};

struct LossStats {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;

    double loss_rate() const
    {
        if (sent == 0)
            return 0.0;
        return 1.0 - static_cast<double>(received) / static_cast<double>(sent);
    }
};

// Per-second delivered-bits buckets anchored at origin. With 1 s windows,
// kbps is simply bits/1000.
class ThroughputMeter {
public:
    explicit ThroughputMeter(SimTime origin = {}) : origin_(origin) {}

    void add(SimTime at, std::uint64_t bits);
    double kbps(std::size_t window) const;
    // Windows fully elapsed by `now` (window k covers [k, k+1) seconds).
    std::size_t completed_windows(SimTime now) const;

private:
    SimTime origin_;
    std::vector<std::uint64_t> bits_;
};

inline constexpr double kNoTrafficKbps = 5.0;

// Strict: exactly the threshold still counts as traffic.
inline bool is_no_traffic(double kbps, double threshold_kbps = kNoTrafficKbps)
{
    return kbps < threshold_kbps;
}

} // namespace vhsim

#endif
