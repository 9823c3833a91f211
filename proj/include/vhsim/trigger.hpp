#ifndef VHSIM_TRIGGER_HPP
#define VHSIM_TRIGGER_HPP

#include <cstddef>
#include <vector>

#include "vhsim/interface.hpp"

namespace vhsim {

struct TriggerConfig {
    double no_traffic_threshold_kbps = 5.0;
    double threshold_wb_s = 3.0;
    double evaluation_period_s = 1.0;

    std::size_t window_samples() const
    {
        return static_cast<std::size_t>(threshold_wb_s / evaluation_period_s);
    }
};

enum class TriggerDecision { Stay, SwitchToBluetooth, SwitchToWiFi };

const char* decision_name(TriggerDecision d);

// history holds chronological 1 s throughput samples; only the newest
// window_samples() entries are considered. The session must be uniformly
// silent (every sample below threshold) to leave Wi-Fi, and uniformly busy
// to leave Bluetooth. Short history or a device out of mutual Bluetooth
// range keeps the current interface.
TriggerDecision evaluate_trigger(const TriggerConfig& cfg,
                                 const std::vector<double>& history_kbps,
                                 InterfaceKind active, bool bt_mutual_range);

} // namespace vhsim

#endif
