#ifndef VHSIM_ENERGY_HPP
#define VHSIM_ENERGY_HPP

#include <vector>

#include "vhsim/interface.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

// Measured per-interface power profile. WakingUp has no direct entry;
// its power is wakeup_energy_mj / wakeup_duration_s.
struct InterfacePower {
    double wakeup_energy_mj;
    double wakeup_duration_s;
    double sleep_mw;
    double active_mw;
    double off_mw;
};

struct EnergyParams {
    InterfacePower wifi;
    InterfacePower bluetooth;

    static EnergyParams defaults();
    const InterfacePower& of(InterfaceKind k) const
    {
        return k == InterfaceKind::WiFi ? wifi : bluetooth;
    }
};

double power_mw(const EnergyParams& p, InterfaceKind kind, InterfaceState state);

struct StateInterval {
    InterfaceKind kind;
    InterfaceState state;
    SimTime from;
    SimTime to;
};

// Sum of power(state) x duration over the intervals, both interfaces mixed.
// Throws std::invalid_argument when an interval runs backwards or two
// intervals of the same interface overlap.
double interval_energy_mj(const EnergyParams& p,
                          const std::vector<StateInterval>& intervals);

struct EnergyLedger {
    std::vector<StateInterval> intervals;

    double total_mj(const EnergyParams& p) const;
    double total_mj(const EnergyParams& p, InterfaceKind kind) const;
};

struct StateChange {
    SimTime at;
    InterfaceKind kind;
    InterfaceState to;
};

// Rebuilds the tiling interval list of [from, to] from initial states plus a
// time-ordered transition list. Throws std::invalid_argument when a change is
// out of order, outside the window, or skips a required intermediate state.
EnergyLedger ledger_from_trace(InterfaceState wifi_initial,
                               InterfaceState bluetooth_initial,
                               const std::vector<StateChange>& changes,
                               SimTime from, SimTime to);

// 1 - proposed/baseline. Throws std::invalid_argument when baseline <= 0.
double savings_fraction(double proposed_mj, double baseline_mj);

// Stated totals of one full switch-down/switch-up cycle, used as anchors for
// the savings projection. They intentionally differ from the sums of the
// individual segments; reports show both rather than reconciling them.
inline constexpr double kCycleEnergyMj = 3471.66;
inline constexpr double kCycleBaselineMj = 4593.54;

// Projected savings fraction after the device additionally idles for
// sleep_s seconds (Bluetooth sleeping vs Wi-Fi sleeping). Increasing in
// sleep_s, bounded by 1 - 292.99/533.25 with the default constants.
double savings_vs_sleep(const EnergyParams& p, double sleep_s);

} // namespace vhsim

#endif
