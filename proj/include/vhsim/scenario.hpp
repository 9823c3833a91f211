#ifndef VHSIM_SCENARIO_HPP
#define VHSIM_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vhsim/handover.hpp"
#include "vhsim/interface.hpp"
#include "vhsim/link.hpp"
#include "vhsim/traffic.hpp"
#include "vhsim/trigger.hpp"

namespace vhsim {

// Flows and control traffic share this UDP port space; the control port is
// reserved for controller-to-controller messages.
inline constexpr std::uint16_t kControlPort = 7700;
inline constexpr std::uint16_t kFirstFlowPort = 5001;

struct DeviceConfig {
    std::string id;
    Mobility mobility;
    InterfaceState wifi_initial = InterfaceState::Off; // off or sleep
    InterfaceState bt_initial = InterfaceState::Off;
    MacAddress wifi_mac;
    MacAddress bt_mac;
    MacAddress virt_mac;
    IpAddress wifi_ip;
    IpAddress bt_ip;
    IpAddress virt_ip;
    std::optional<double> controller_die_at_s;
    std::optional<double> controller_revive_at_s;
};

struct NetworkConfig {
    bool is_bss = false;
    std::string id;
    std::string hub; // piconet master or BSS access point
    std::vector<std::string> members;
    LinkParams params;
};

enum class FlowKind { Cbr, Speech };

struct FlowConfig {
    std::string id;
    FlowKind kind = FlowKind::Cbr;
    std::string from;
    std::string to;
    double rate_kbps = 0.0; // on-rate during talkspurts for speech flows
    std::uint32_t packet_bytes = 0;
    double start_s = 0.0;
    double stop_s = 0.0;
    std::uint16_t dst_port = 0;
    SpeechModelConfig speech;
};

struct RelayConfig {
    std::string id;
    std::string via;
    std::string a;
    std::string b;
};

struct ForcedHandover {
    double t_s = 0.0;
    std::string device;
    HandoverDirection direction = HandoverDirection::BluetoothToWiFi;
};

struct Scenario {
    double duration_s = 0.0;
    std::uint64_t seed = 1;
    bool trigger_enabled = true;
    TriggerConfig trigger;
    HandoverConfig handover;
    std::vector<DeviceConfig> devices;
    std::vector<NetworkConfig> networks;
    std::vector<FlowConfig> flows;
    std::vector<RelayConfig> relays;
    std::vector<ForcedHandover> script;

    const DeviceConfig* find_device(const std::string& id) const;
    const NetworkConfig* common_network(const std::string& a, const std::string& b,
                                        std::optional<bool> bss_kind = {}) const;
};

// First-error diagnostic: code is a stable machine-readable tag, line is
// 1-based (0 when the error is not tied to a single line).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, std::string code, const std::string& message)
        : std::runtime_error(message.empty() ? code : message),
          line_(line), code_(std::move(code))
    {
    }

    int line() const { return line_; }
    const std::string& code() const { return code_; }

    std::string render() const
    {
        std::string out = "scenario error";
        if (line_ > 0)
            out += " (line " + std::to_string(line_) + ")";
        return out + " [" + code_ + "]: " + what();
    }

private:
    int line_;
    std::string code_;
};

// Parses and validates; defaults (addresses, ports, stop times) are filled
// in so the result round-trips through serialize_scenario.
Scenario parse_scenario(const std::string& text);

std::string serialize_scenario(const Scenario& sc);

bool scenario_equal(const Scenario& a, const Scenario& b);

} // namespace vhsim

#endif
