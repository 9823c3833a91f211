#include "vhsim/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace vhsim {

EnergyParams EnergyParams::defaults()
{
    EnergyParams p;
    p.wifi = {536.77, 1.4, 495.05, 660.09, 213.75};
    p.bluetooth = {417.98, 3.03, 79.24, 104.21, 38.20};
    return p;
}

double power_mw(const EnergyParams& p, InterfaceKind kind, InterfaceState state)
{
    const InterfacePower& e = p.of(kind);
    switch (state) {
    case InterfaceState::Off:      return e.off_mw;
    case InterfaceState::Sleep:    return e.sleep_mw;
    case InterfaceState::Active:   return e.active_mw;
    case InterfaceState::WakingUp: return e.wakeup_energy_mj / e.wakeup_duration_s;
    }
    throw std::invalid_argument("power_mw: bad state");
}

double interval_energy_mj(const EnergyParams& p,
                          const std::vector<StateInterval>& intervals)
{
    for (InterfaceKind kind : {InterfaceKind::WiFi, InterfaceKind::Bluetooth}) {
        std::vector<const StateInterval*> own;
        for (const auto& iv : intervals) {
            if (iv.to < iv.from)
                throw std::invalid_argument("interval runs backwards");
            if (iv.kind == kind)
                own.push_back(&iv);
        }
        std::sort(own.begin(), own.end(),
                  [](const StateInterval* a, const StateInterval* b) {
                      return a->from < b->from;
                  });
        for (std::size_t i = 1; i < own.size(); ++i) {
            if (own[i]->from < own[i - 1]->to)
                throw std::invalid_argument("overlapping intervals for one interface");
        }
    }
    double total = 0.0;
    for (const auto& iv : intervals)
        total += power_mw(p, iv.kind, iv.state) * us_to_sec(iv.to.us - iv.from.us);
    return total;
}

double EnergyLedger::total_mj(const EnergyParams& p) const
{
    return interval_energy_mj(p, intervals);
}

double EnergyLedger::total_mj(const EnergyParams& p, InterfaceKind kind) const
{
    double total = 0.0;
    for (const auto& iv : intervals) {
        if (iv.kind == kind)
            total += power_mw(p, iv.kind, iv.state) * us_to_sec(iv.to.us - iv.from.us);
    }
    return total;
}

EnergyLedger ledger_from_trace(InterfaceState wifi_initial,
                               InterfaceState bluetooth_initial,
                               const std::vector<StateChange>& changes,
                               SimTime from, SimTime to)
{
    if (to < from)
        throw std::invalid_argument("ledger_from_trace: window runs backwards");

    struct Cursor {
        InterfaceState state;
        SimTime since;
    };
    Cursor cur[2] = {{wifi_initial, from}, {bluetooth_initial, from}};
    auto idx = [](InterfaceKind k) { return k == InterfaceKind::WiFi ? 0 : 1; };

    EnergyLedger ledger;
    SimTime last = from;
    for (const auto& ch : changes) {
        if (ch.at < last)
            throw std::invalid_argument("ledger_from_trace: changes out of order");
        if (ch.at < from || to < ch.at)
            throw std::invalid_argument("ledger_from_trace: change outside window");
        Cursor& c = cur[idx(ch.kind)];
        if (!transition_allowed(c.state, ch.to))
            throw std::invalid_argument("ledger_from_trace: missing transition step");
        if (c.since < ch.at)
            ledger.intervals.push_back({ch.kind, c.state, c.since, ch.at});
        c.state = ch.to;
        c.since = ch.at;
        last = ch.at;
    }
    for (InterfaceKind kind : {InterfaceKind::WiFi, InterfaceKind::Bluetooth}) {
        Cursor& c = cur[idx(kind)];
        if (c.since < to)
            ledger.intervals.push_back({kind, c.state, c.since, to});
    }
    return ledger;
}

double savings_fraction(double proposed_mj, double baseline_mj)
{
    if (baseline_mj <= 0.0)
        throw std::invalid_argument("savings_fraction: non-positive baseline");
    return 1.0 - proposed_mj / baseline_mj;
}

double savings_vs_sleep(const EnergyParams& p, double sleep_s)
{
    double idle_mw = p.bluetooth.sleep_mw + p.wifi.off_mw;
    double baseline_mw = p.wifi.sleep_mw + p.bluetooth.off_mw;
    return 1.0 - (kCycleEnergyMj + idle_mw * sleep_s)
               / (kCycleBaselineMj + baseline_mw * sleep_s);
}

} // namespace vhsim
