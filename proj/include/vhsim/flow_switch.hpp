#ifndef VHSIM_FLOW_SWITCH_HPP
#define VHSIM_FLOW_SWITCH_HPP

#include <cstdint>
#include <functional>

#include "vhsim/flow_table.hpp"

namespace vhsim {

struct ForwardDecision {
    enum class Verdict {
        Forward,    // out_port and packet are valid
        Drop,       // rule said drop, or miss with Drop behavior
        ArpHandled, // diverted to the extended controller
        Unhandled,  // miss that no controller resolved
    };

    Verdict verdict = Verdict::Unhandled;
    Port out_port = Port::Virtual;
    Packet packet; // post-rewrite copy on Forward
};

struct SwitchCounters {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t packet_ins = 0;
    std::uint64_t unhandled_miss = 0;
    std::uint64_t rule_drops = 0;
    std::uint64_t miss_drops = 0;
    std::uint64_t arp_handled = 0;
    std::uint64_t arp_unresolved = 0;
};

// Per-device switch. ARP never touches the flow table; everything else is
// matched, and misses escalate through the packet-in handler (which installs
// rules synchronously or reports failure).
class FlowSwitch {
public:
    // Returns true when the controller stack answered the ARP.
    using ArpHandler = std::function<bool(const Packet&, Port)>;
    // Returns true when a rule covering the packet was installed.
    using PacketInHandler = std::function<bool(const Packet&, Port)>;

    FlowTable& table() { return table_; }
    const FlowTable& table() const { return table_; }
    SwitchCounters& counters() { return counters_; }
    const SwitchCounters& counters() const { return counters_; }

    void set_arp_handler(ArpHandler h) { arp_ = std::move(h); }
    void set_packet_in_handler(PacketInHandler h) { packet_in_ = std::move(h); }

    bool intercept_arp(const Packet& p, Port in_port);
    ForwardDecision process(const Packet& p, Port in_port);

private:
    ForwardDecision apply(const FlowRule& rule, const Packet& p);

    FlowTable table_;
    SwitchCounters counters_;
    ArpHandler arp_;
    PacketInHandler packet_in_;
};

} // namespace vhsim

#endif
