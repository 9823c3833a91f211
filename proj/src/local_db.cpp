#include "vhsim/local_db.hpp"

#include <cstdio>

namespace vhsim {

const PeerRecord* LocalDb::find_peer(const std::string& id) const
{
    auto it = peers_.find(id);
    return it == peers_.end() ? nullptr : &it->second;
}

const PeerRecord* LocalDb::find_peer_by_virtual_ip(const IpAddress& ip) const
{
    for (const auto& [id, rec] : peers_) {
        if (rec.virt.ip.same_host(ip))
            return &rec;
    }
    return nullptr;
}

const PeerRecord* LocalDb::find_peer_by_port(std::uint16_t port) const
{
    auto it = port_peers_.find(port);
    return it == port_peers_.end() ? nullptr : find_peer(it->second);
}

void LocalDb::bind_port(std::uint16_t port, const std::string& peer_id)
{
    port_peers_[port] = peer_id;
}

void LocalDb::add_relay_binding(RelayBinding b)
{
    bindings_.push_back(std::move(b));
}

const RelayBinding* LocalDb::relay_binding_for(std::uint16_t port) const
{
    for (const auto& b : bindings_) {
        if (b.port == port)
            return &b;
    }
    return nullptr;
}

void LocalDb::note_rtt_sample(const std::string& peer_id, double sample_us)
{
    auto it = peers_.find(peer_id);
    if (it == peers_.end())
        return;
    PeerRecord& rec = it->second;
    if (rec.rtt_us <= 0.0)
        rec.rtt_us = sample_us;
    else
        rec.rtt_us += (sample_us - rec.rtt_us) / 8.0;
}

std::string LocalDb::dump() const
{
    std::string out;
    out += "self " + self_id + " virt " + self_virt.mac.to_string() + " "
           + self_virt.ip.to_string() + "\n";
    out += "self " + self_id + " wifi " + self_wifi.mac.to_string() + " "
           + self_wifi.ip.to_string() + "\n";
    out += "self " + self_id + " bt " + self_bt.mac.to_string() + " "
           + self_bt.ip.to_string() + "\n";
    for (const auto& [id, rec] : peers_) {
        out += "peer " + id + " virt " + rec.virt.mac.to_string() + " "
               + rec.virt.ip.to_string();
        for (InterfaceKind k : {InterfaceKind::WiFi, InterfaceKind::Bluetooth}) {
            const PeerIfaceInfo& info = rec.iface(k);
            out += std::string(" ") + kind_name(k) + " ";
            if (info.known) {
                out += info.addr.mac.to_string() + " " + info.addr.ip.to_string()
                       + (info.reachable ? " up" : " down");
            } else {
                out += "unknown";
            }
        }
        out += std::string(" path ") + kind_name(rec.path_kind);
        if (rec.via)
            out += " via " + *rec.via;
        char rtt[32];
        std::snprintf(rtt, sizeof rtt, " rtt_us %.0f", rec.rtt_us);
        out += rtt;
        out += rec.exchange_done ? " exchanged" : " pending";
        out += "\n";
    }
    for (const auto& b : bindings_) {
        out += "relay port " + std::to_string(b.port) + " " + b.a_id + "("
               + kind_name(b.a_kind) + ")<->" + b.b_id + "(" + kind_name(b.b_kind)
               + ")\n";
    }
    return out;
}

} // namespace vhsim
