#ifndef VHSIM_HANDOVER_HPP
#define VHSIM_HANDOVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/interface.hpp"
#include "vhsim/rng.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

enum class HandoverDirection { WiFiToBluetooth, BluetoothToWiFi };

const char* direction_name(HandoverDirection d);

inline InterfaceKind target_kind(HandoverDirection d)
{
    return d == HandoverDirection::WiFiToBluetooth ? InterfaceKind::Bluetooth
                                                   : InterfaceKind::WiFi;
}

inline InterfaceKind source_kind(HandoverDirection d)
{
    return d == HandoverDirection::WiFiToBluetooth ? InterfaceKind::WiFi
                                                   : InterfaceKind::Bluetooth;
}

// Strict forward order; Aborted is reachable from the three middle phases
// only. Traffic keeps using the old interface until the commit completes.
enum class HandoverPhase {
    Idle,
    WakingBackup,
    Associating,
    Synchronizing,
    Committing,
    Done,
    Aborted,
};

const char* phase_name(HandoverPhase p);

struct HandoverConfig {
    // Per-direction durations of the two commit-time activities, in ms.
    Distribution to_wifi_config_ms = Distribution::uniform(70.0, 90.0);
    Distribution to_wifi_rule_ms = Distribution::uniform(70.0, 90.0);
    Distribution to_bt_config_ms = Distribution::uniform(80.0, 150.0);
    Distribution to_bt_rule_ms = Distribution::config_ratio(1.0 / 6.0);
    double sync_timeout_s = 5.0;
    double initial_rtt_ms = 100.0;
    double fallback_install_extra_ms = 0.0;

    const Distribution& config_dist(HandoverDirection d) const
    {
        return d == HandoverDirection::BluetoothToWiFi ? to_wifi_config_ms
                                                       : to_bt_config_ms;
    }
    const Distribution& rule_dist(HandoverDirection d) const
    {
        return d == HandoverDirection::BluetoothToWiFi ? to_wifi_rule_ms
                                                       : to_bt_rule_ms;
    }
};

// Samples the two activity durations for one commit. A config_ratio rule
// distribution derives from the config draw instead of consuming a draw.
struct ActivityDurations {
    double config_ms;
    double rule_install_ms;
};

ActivityDurations sample_durations(const HandoverConfig& cfg,
                                   HandoverDirection d, SimRng& rng);

struct HandoverRecord {
    HandoverDirection direction = HandoverDirection::WiFiToBluetooth;
    SimTime started_at;
    std::optional<SimTime> committed_at; // empty = aborted
    double t_config_ms = 0.0;
    double t_rule_install_ms = 0.0;
    double delay_ms = 0.0; // max of the two activities
    std::uint64_t lost_packets = 0;
    std::uint64_t epoch = 0;
    std::string device;
};

// Packets steered to the new interface before it is configured are lost:
// counts sends in [rule_done, config_done). A configuration that finishes
// first makes the window empty.
std::uint64_t handover_loss(SimTime rule_done, SimTime config_done,
                            const std::vector<SimTime>& send_schedule);

} // namespace vhsim

#endif
