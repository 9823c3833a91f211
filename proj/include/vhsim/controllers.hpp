#ifndef VHSIM_CONTROLLERS_HPP
#define VHSIM_CONTROLLERS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/flow_switch.hpp"
#include "vhsim/local_db.hpp"

namespace vhsim {

enum class ControllerState { Alive, Dead };

struct ControllerLiveness {
    ControllerState state = ControllerState::Alive;
    std::optional<SimTime> died_at;
    std::optional<SimTime> revived_at;

    bool alive() const { return state == ControllerState::Alive; }
};

// Port <-> interface mapping used across the artifact.
inline Port port_of(InterfaceKind k)
{
    return k == InterfaceKind::WiFi ? Port::WiFi : Port::Bluetooth;
}

inline InterfaceKind kind_of(Port p)
{
    return p == Port::WiFi ? InterfaceKind::WiFi : InterfaceKind::Bluetooth;
}

struct SynthesisResult {
    std::vector<FlowRule> rules;
    // Set when no rule could be formed; names the counter to bump.
    std::string failure; // "unknown_peer" or empty
};

inline constexpr std::uint32_t kSessionRulePriority = 100;

// Forms the forwarding rules for a table-miss packet from LocalDb state.
// Misses at the virtual port yield an outbound/inbound pair along the
// peer's current path; misses at a physical port yield either the relay
// pair for that flow port or a single inbound-to-virtual rule. Pure in
// (db, packet, in_port), so local and fallback installs agree field by
// field apart from origin.
SynthesisResult synthesize_rules(const LocalDb& db, const Packet& p,
                                 Port in_port, SimTime now, RuleOrigin origin,
                                 std::uint64_t& next_rule_id);

struct ControllerCounters {
    std::uint64_t packet_ins = 0;
    std::uint64_t local_installs = 0;
    std::uint64_t fallback_installs = 0;
    std::uint64_t unknown_peer = 0;
};

// Per-device controller pair: the local controller answers packet-ins while
// alive; the extended controller's flow-rules component installs the same
// rules through the management channel when it is dead.
class ControllerStack {
public:
    ControllerLiveness liveness;
    ControllerCounters counters;

    // Returns true when rules covering the packet were installed.
    bool handle_packet_in(LocalDb& db, FlowSwitch& fs, const Packet& p,
                          Port in_port, SimTime now);

    // Replaces every session rule for the given flow port along the peer's
    // current path; used at handover rule-install completion.
    void reinstall_port_rules(LocalDb& db, FlowSwitch& fs,
                              const std::string& peer_id, std::uint16_t port,
                              SimTime now);

    std::uint64_t next_rule_id() { return next_rule_id_++; }

private:
    std::uint64_t next_rule_id_ = 1;
};

} // namespace vhsim

#endif
