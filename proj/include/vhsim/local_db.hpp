#ifndef VHSIM_LOCAL_DB_HPP
#define VHSIM_LOCAL_DB_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/interface.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

struct PeerIfaceInfo {
    InterfaceAddr addr;
    bool known = false;
    bool reachable = false;
    SimTime last_updated;
};

// Everything one device has learned about one peer: addresses from the
// D2D exchange or static provisioning, plus the current path to reach it.
struct PeerRecord {
    std::string peer_id;
    InterfaceAddr virt;
    PeerIfaceInfo wifi;
    PeerIfaceInfo bt;
    bool exchange_done = false;

    InterfaceKind path_kind = InterfaceKind::Bluetooth;
    std::optional<std::string> via; // relay device id when indirect
    InterfaceAddr nexthop;          // wire dst for this path

    double rtt_us = 0.0; // smoothed estimate, requester-side samples

    PeerIfaceInfo& iface(InterfaceKind k)
    {
        return k == InterfaceKind::WiFi ? wifi : bt;
    }
    const PeerIfaceInfo& iface(InterfaceKind k) const
    {
        return k == InterfaceKind::WiFi ? wifi : bt;
    }
};

// One forwarding binding on a relay device: flow port P entering on the
// a-side leg leaves on the b-side leg rewritten, and vice versa.
struct RelayBinding {
    std::uint16_t port = 0;
    std::string a_id;
    std::string b_id;
    InterfaceKind a_kind = InterfaceKind::Bluetooth;
    InterfaceKind b_kind = InterfaceKind::WiFi;
    InterfaceAddr a_addr; // endpoint phys addr on the a-side leg
    InterfaceAddr b_addr;
};

// Self interface records stay complete for both interfaces even while an
// interface is down; exchange_done flips false to true at most once per peer.
class LocalDb {
public:
    std::string self_id;
    InterfaceAddr self_virt;
    InterfaceAddr self_wifi;
    InterfaceAddr self_bt;

    const InterfaceAddr& self_phys(InterfaceKind k) const
    {
        return k == InterfaceKind::WiFi ? self_wifi : self_bt;
    }

    PeerRecord& peer(const std::string& id) { return peers_[id]; }
    const PeerRecord* find_peer(const std::string& id) const;
    const PeerRecord* find_peer_by_virtual_ip(const IpAddress& ip) const;
    const PeerRecord* find_peer_by_port(std::uint16_t port) const;
    const std::map<std::string, PeerRecord>& peers() const { return peers_; }

    void bind_port(std::uint16_t port, const std::string& peer_id);

    void add_relay_binding(RelayBinding b);
    const RelayBinding* relay_binding_for(std::uint16_t port) const;
    const std::vector<RelayBinding>& relay_bindings() const { return bindings_; }

    // Requester-side smoothed RTT, weight 1/8 per sample.
    void note_rtt_sample(const std::string& peer_id, double sample_us);

    // Canonical key-sorted dump, one record per line.
    std::string dump() const;

private:
    std::map<std::string, PeerRecord> peers_;
    std::map<std::uint16_t, std::string> port_peers_;
    std::vector<RelayBinding> bindings_;
};

} // namespace vhsim

#endif
