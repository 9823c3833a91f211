#ifndef VHSIM_DEVICE_HPP
#define VHSIM_DEVICE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vhsim/controllers.hpp"
#include "vhsim/energy.hpp"
#include "vhsim/event_queue.hpp"
#include "vhsim/flow_switch.hpp"
#include "vhsim/handover.hpp"
#include "vhsim/link.hpp"
#include "vhsim/local_db.hpp"

namespace vhsim {

// Live state of one radio. Association and configuration are separate:
// a freshly associated interface carries traffic only after the IP/tunnel
// configuration activity finishes.
struct InterfaceRuntime {
    InterfaceKind kind = InterfaceKind::WiFi;
    InterfaceAddr addr;
    InterfaceState state = InterfaceState::Off;
    bool associated = false;
    bool configured = false;
    int network = -1; // index into the world's network list, -1 = none
    SimTime last_activity;
    EventQueue::Handle idle_timer;

    bool powered() const
    {
        return state == InterfaceState::Sleep || state == InterfaceState::Active;
    }
};

// Connection-manager bookkeeping for the handover in flight. One handover
// at a time per device; epoch survives across handovers and only grows.
struct ConnectionManager {
    HandoverPhase phase = HandoverPhase::Idle;
    HandoverDirection direction = HandoverDirection::WiFiToBluetooth;
    std::uint64_t epoch = 0;
    std::string peer;

    bool got_syn = false;   // current-epoch SYN received
    bool sent_syn = false;
    bool replied = false;   // answered the peer's first SYN
    SimTime last_syn_send;
    EventQueue::Handle syn_retx;
    EventQueue::Handle sync_deadline;
    EventQueue::Handle commit_timer;

    bool rule_finished = false;
    bool config_finished = false;
    SimTime rule_done;
    SimTime config_done;

    HandoverRecord current;
};

struct Device {
    std::string id;
    Mobility mobility;
    InterfaceAddr virt;
    InterfaceRuntime wifi;
    InterfaceRuntime bt;
    InterfaceKind active_kind = InterfaceKind::Bluetooth;

    LocalDb db;
    ControllerStack ctrl;
    FlowSwitch fs;
    ConnectionManager cm;

    std::vector<StateChange> state_log; // time-ordered, both interfaces
    std::vector<HandoverRecord> handovers;

    InterfaceRuntime& iface(InterfaceKind k)
    {
        return k == InterfaceKind::WiFi ? wifi : bt;
    }
    const InterfaceRuntime& iface(InterfaceKind k) const
    {
        return k == InterfaceKind::WiFi ? wifi : bt;
    }

    // Sender-side gate: association, configuration and power.
    bool ready_for_tx(InterfaceKind k) const
    {
        const InterfaceRuntime& i = iface(k);
        return i.associated && i.configured && i.powered();
    }

    // Receiver-side gate: configuration is not required to receive, so
    // handover losses stay attributable to the sending side.
    bool can_receive(InterfaceKind k) const
    {
        const InterfaceRuntime& i = iface(k);
        return i.associated && i.powered();
    }

    std::pair<double, double> pos(double t_s) const { return mobility.at(t_s); }

    // Validates the transition and appends to the state log.
    // Throws std::logic_error on an illegal transition.
    void set_state(InterfaceKind k, InterfaceState to, SimTime at);
};

} // namespace vhsim

#endif
