#include "vhsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace vhsim {

void JitterEstimator::update(SimTime send_time, SimTime recv_time)
{
    std::int64_t transit = delta_us(recv_time, send_time);
    if (prev_transit_us_) {
        double d = std::abs(static_cast<double>(transit - *prev_transit_us_));
        j_us_ += (d - j_us_) / 16.0;
        if (j_us_ > max_us_)
            max_us_ = j_us_;
    }
    prev_transit_us_ = transit;
    ++samples_;
}

void ThroughputMeter::add(SimTime at, std::uint64_t bits)
{
    if (at < origin_)
        throw std::invalid_argument("throughput: sample precedes origin");
    std::size_t window = (at.us - origin_.us) / kUsPerSec;
    if (bits_.size() <= window)
        bits_.resize(window + 1, 0);
    bits_[window] += bits;
}

double ThroughputMeter::kbps(std::size_t window) const
{
    if (window >= bits_.size())
        return 0.0;
    return static_cast<double>(bits_[window]) / 1000.0;
}

std::size_t ThroughputMeter::completed_windows(SimTime now) const
{
    if (now < origin_)
        return 0;
    return (now.us - origin_.us) / kUsPerSec;
}

} // namespace vhsim
