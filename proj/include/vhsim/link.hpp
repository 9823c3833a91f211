#ifndef VHSIM_LINK_HPP
#define VHSIM_LINK_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "vhsim/rng.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

struct LinkParams {
    double rate_kbps = 0.0;
    double base_delay_ms = 0.0;
    Distribution jitter_ms = Distribution::uniform(0.0, 5.0);
    double loss_prob = 0.0;
    double range_m = 0.0;

    static LinkParams wifi_defaults();
    static LinkParams bluetooth_defaults();
};

std::uint64_t serialization_us(const LinkParams& p, std::uint32_t size_bytes);

// Half-duplex FIFO single-server channel shared by every member of one
// network. A frame occupies the channel for its serialization time even
// when the loss draw discards it.
class Channel {
public:
    struct PlannedHop {
        SimTime tx_start;
        SimTime tx_end;
        SimTime arrival;
        bool lost = false;
    };

    // Draw order is fixed (jitter, then loss) for reproducibility.
    PlannedHop plan(const LinkParams& p, SimTime now, std::uint32_t size_bytes,
                    SimRng& rng);

    SimTime free_at() const { return free_at_; }

private:
    SimTime free_at_;
};

struct Waypoint {
    double t_s = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Piecewise-linear motion: anchored at the initial position at t=0, moving
// through the waypoints in time order, holding the last position after.
struct Mobility {
    double x0 = 0.0;
    double y0 = 0.0;
    std::vector<Waypoint> waypoints;

    std::pair<double, double> at(double t_s) const;
};

double distance_m(std::pair<double, double> a, std::pair<double, double> b);

// Boundary inclusive: exactly range_m is still in range.
bool in_range(std::pair<double, double> a, std::pair<double, double> b,
              double range_m);

} // namespace vhsim

#endif
