#include "vhsim/controllers.hpp"

namespace vhsim {

namespace {

FlowRule base_rule(SimTime now, RuleOrigin origin, std::uint64_t id)
{
    FlowRule r;
    r.rule_id = id;
    r.priority = kSessionRulePriority;
    r.installed_at = now;
    r.origin = origin;
    return r;
}

// virtual port in -> rewrite to the wire addresses of the current path.
FlowRule outbound_rule(const LocalDb& db, const PeerRecord& peer,
                       std::uint16_t port, SimTime now, RuleOrigin origin,
                       std::uint64_t id)
{
    const InterfaceAddr& self = db.self_phys(peer.path_kind);
    FlowRule r = base_rule(now, origin, id);
    r.match.in_port = Port::Virtual;
    r.match.ip_dst = peer.virt.ip;
    r.match.protocol = Protocol::UDP;
    r.match.dst_port = port;
    r.actions = {
        FlowAction::set_eth_src(self.mac),
        FlowAction::set_eth_dst(peer.nexthop.mac),
        FlowAction::set_ip_src(self.ip),
        FlowAction::set_ip_dst(peer.nexthop.ip),
        FlowAction::output(port_of(peer.path_kind)),
    };
    return r;
}

// physical port in -> restore virtual addresses for the application.
FlowRule inbound_rule(const LocalDb& db, const PeerRecord& peer, Port in,
                      std::uint16_t port, SimTime now, RuleOrigin origin,
                      std::uint64_t id)
{
    FlowRule r = base_rule(now, origin, id);
    r.match.in_port = in;
    r.match.protocol = Protocol::UDP;
    r.match.dst_port = port;
    r.actions = {
        FlowAction::set_eth_src(peer.virt.mac),
        FlowAction::set_eth_dst(db.self_virt.mac),
        FlowAction::set_ip_src(peer.virt.ip),
        FlowAction::set_ip_dst(db.self_virt.ip),
        FlowAction::output(Port::Virtual),
    };
    return r;
}

FlowRule relay_leg_rule(const LocalDb& db, InterfaceKind from_kind,
                        InterfaceKind to_kind, const InterfaceAddr& to_addr,
                        std::uint16_t port, SimTime now, RuleOrigin origin,
                        std::uint64_t id)
{
    const InterfaceAddr& self = db.self_phys(to_kind);
    FlowRule r = base_rule(now, origin, id);
    r.match.in_port = port_of(from_kind);
    r.match.protocol = Protocol::UDP;
    r.match.dst_port = port;
    r.actions = {
        FlowAction::set_eth_src(self.mac),
        FlowAction::set_eth_dst(to_addr.mac),
        FlowAction::set_ip_src(self.ip),
        FlowAction::set_ip_dst(to_addr.ip),
        FlowAction::output(port_of(to_kind)),
    };
    return r;
}

} // namespace

SynthesisResult synthesize_rules(const LocalDb& db, const Packet& p,
                                 Port in_port, SimTime now, RuleOrigin origin,
                                 std::uint64_t& next_rule_id)
{
    SynthesisResult out;

    if (in_port == Port::Virtual) {
        const PeerRecord* peer = db.find_peer_by_virtual_ip(p.dst_ip);
        if (!peer) {
            out.failure = "unknown_peer";
            return out;
        }
        out.rules.push_back(outbound_rule(db, *peer, p.dst_port, now, origin,
                                          next_rule_id++));
        out.rules.push_back(inbound_rule(db, *peer, port_of(peer->path_kind),
                                         p.dst_port, now, origin, next_rule_id++));
        return out;
    }

    if (const RelayBinding* b = db.relay_binding_for(p.dst_port)) {
        out.rules.push_back(relay_leg_rule(db, b->a_kind, b->b_kind, b->b_addr,
                                           b->port, now, origin, next_rule_id++));
        out.rules.push_back(relay_leg_rule(db, b->b_kind, b->a_kind, b->a_addr,
                                           b->port, now, origin, next_rule_id++));
        return out;
    }

    const PeerRecord* peer = db.find_peer_by_port(p.dst_port);
    if (!peer) {
        out.failure = "unknown_peer";
        return out;
    }
    out.rules.push_back(inbound_rule(db, *peer, in_port, p.dst_port, now, origin,
                                     next_rule_id++));
    return out;
}

bool ControllerStack::handle_packet_in(LocalDb& db, FlowSwitch& fs,
                                       const Packet& p, Port in_port, SimTime now)
{
    ++counters.packet_ins;
    RuleOrigin origin = liveness.alive() ? RuleOrigin::LocalController
                                         : RuleOrigin::ExtendedController;
    SynthesisResult r = synthesize_rules(db, p, in_port, now, origin, next_rule_id_);
    if (!r.failure.empty()) {
        if (r.failure == "unknown_peer")
            ++counters.unknown_peer;
        return false;
    }
    for (auto& rule : r.rules)
        fs.table().install(std::move(rule));
    if (origin == RuleOrigin::LocalController)
        ++counters.local_installs;
    else
        ++counters.fallback_installs;
    return true;
}

void ControllerStack::reinstall_port_rules(LocalDb& db, FlowSwitch& fs,
                                           const std::string& peer_id,
                                           std::uint16_t port, SimTime now)
{
    const PeerRecord* peer = db.find_peer(peer_id);
    if (!peer)
        return;
    // Make-before-break: replace the egress rule and any ingress rule on the
    // new path, but keep the old path's ingress rule so in-flight stragglers
    // still match. The caller tears it down with the old interface.
    Port path = port_of(peer->path_kind);
    fs.table().remove_where([port, path](const FlowRule& r) {
        if (!r.match.dst_port || *r.match.dst_port != port)
            return false;
        return !r.match.in_port || *r.match.in_port == Port::Virtual
               || *r.match.in_port == path;
    });
    RuleOrigin origin = liveness.alive() ? RuleOrigin::LocalController
                                         : RuleOrigin::ExtendedController;
    fs.table().install(outbound_rule(db, *peer, port, now, origin, next_rule_id_++));
    fs.table().install(inbound_rule(db, *peer, path, port, now, origin,
                                    next_rule_id_++));
}

} // namespace vhsim
