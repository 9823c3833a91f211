#include "vhsim/link.hpp"

#include <algorithm>
#include <cmath>

namespace vhsim {

LinkParams LinkParams::wifi_defaults()
{
    LinkParams p;
    p.rate_kbps = 20000.0;
    p.base_delay_ms = 2.0;
    p.jitter_ms = Distribution::uniform(0.0, 5.0);
    p.loss_prob = 0.0;
    p.range_m = 100.0;
    return p;
}

LinkParams LinkParams::bluetooth_defaults()
{
    LinkParams p;
    p.rate_kbps = 700.0;
    p.base_delay_ms = 15.0;
    p.jitter_ms = Distribution::uniform(0.0, 5.0);
    p.loss_prob = 0.0;
    p.range_m = 10.0;
    return p;
}

std::uint64_t serialization_us(const LinkParams& p, std::uint32_t size_bytes)
{
    double bits = static_cast<double>(size_bytes) * 8.0;
    return static_cast<std::uint64_t>(std::llround(bits * 1000.0 / p.rate_kbps));
}

Channel::PlannedHop Channel::plan(const LinkParams& p, SimTime now,
                                  std::uint32_t size_bytes, SimRng& rng)
{
    PlannedHop hop;
    hop.tx_start = std::max(now, free_at_);
    hop.tx_end = hop.tx_start + serialization_us(p, size_bytes);
    free_at_ = hop.tx_end;

    double jitter = std::max(0.0, p.jitter_ms.sample(rng));
    hop.arrival = hop.tx_end + ms_to_us(p.base_delay_ms) + ms_to_us(jitter);
    hop.lost = rng.chance(p.loss_prob);
    return hop;
}

std::pair<double, double> Mobility::at(double t_s) const
{
    double px = x0;
    double py = y0;
    double pt = 0.0;
    for (const auto& w : waypoints) {
        if (t_s >= w.t_s) {
            px = w.x;
            py = w.y;
            pt = w.t_s;
            continue;
        }
        if (w.t_s <= pt)
            break;
        double f = (t_s - pt) / (w.t_s - pt);
        return {px + f * (w.x - px), py + f * (w.y - py)};
    }
    return {px, py};
}

double distance_m(std::pair<double, double> a, std::pair<double, double> b)
{
    double dx = a.first - b.first;
    double dy = a.second - b.second;
    return std::sqrt(dx * dx + dy * dy);
}

bool in_range(std::pair<double, double> a, std::pair<double, double> b,
              double range_m)
{
    return distance_m(a, b) <= range_m;
}

} // namespace vhsim
