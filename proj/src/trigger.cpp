#include "vhsim/trigger.hpp"

namespace vhsim {

const char* decision_name(TriggerDecision d)
{
    switch (d) {
    case TriggerDecision::Stay:              return "stay";
    case TriggerDecision::SwitchToBluetooth: return "switch-to-bluetooth";
    case TriggerDecision::SwitchToWiFi:      return "switch-to-wifi";
    }
    return "unknown";
}

TriggerDecision evaluate_trigger(const TriggerConfig& cfg,
                                 const std::vector<double>& history_kbps,
                                 InterfaceKind active, bool bt_mutual_range)
{
    std::size_t need = cfg.window_samples();
    if (need == 0 || history_kbps.size() < need)
        return TriggerDecision::Stay;

    bool all_silent = true;
    bool all_busy = true;
    for (std::size_t i = history_kbps.size() - need; i < history_kbps.size(); ++i) {
        if (history_kbps[i] < cfg.no_traffic_threshold_kbps)
            all_busy = false;
        else
            all_silent = false;
    }

    if (all_silent && active == InterfaceKind::WiFi && bt_mutual_range)
        return TriggerDecision::SwitchToBluetooth;
    if (all_busy && active == InterfaceKind::Bluetooth)
        return TriggerDecision::SwitchToWiFi;
    return TriggerDecision::Stay;
}

} // namespace vhsim
