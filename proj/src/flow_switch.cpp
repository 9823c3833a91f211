#include "vhsim/flow_switch.hpp"

namespace vhsim {

bool FlowSwitch::intercept_arp(const Packet& p, Port in_port)
{
    if (p.protocol != Protocol::ARP)
        return false;
    if (arp_ && arp_(p, in_port))
        ++counters_.arp_handled;
    else
        ++counters_.arp_unresolved;
    return true;
}

ForwardDecision FlowSwitch::apply(const FlowRule& rule, const Packet& p)
{
    ForwardDecision d;
    d.packet = p;
    bool has_output = false;
    for (const auto& a : rule.actions) {
        switch (a.kind) {
        case FlowAction::Kind::SetEthSrc: d.packet.src_mac = a.mac; break;
        case FlowAction::Kind::SetEthDst: d.packet.dst_mac = a.mac; break;
        case FlowAction::Kind::SetIpSrc:  d.packet.src_ip = a.ip; break;
        case FlowAction::Kind::SetIpDst:  d.packet.dst_ip = a.ip; break;
        case FlowAction::Kind::Output:
            d.out_port = a.port;
            has_output = true;
            break;
        case FlowAction::Kind::Drop:
            ++counters_.rule_drops;
            d.verdict = ForwardDecision::Verdict::Drop;
            return d;
        }
    }
    if (!has_output) {
        // No output action means the rule consumes the packet.
        ++counters_.rule_drops;
        d.verdict = ForwardDecision::Verdict::Drop;
        return d;
    }
    d.verdict = ForwardDecision::Verdict::Forward;
    return d;
}

ForwardDecision FlowSwitch::process(const Packet& p, Port in_port)
{
    if (intercept_arp(p, in_port)) {
        ForwardDecision d;
        d.verdict = ForwardDecision::Verdict::ArpHandled;
        d.packet = p;
        return d;
    }

    if (const FlowRule* rule = table_.lookup(p, in_port)) {
        ++counters_.hits;
        return apply(*rule, p);
    }

    ++counters_.misses;
    if (table_.miss_behavior() == FlowTable::MissBehavior::Drop) {
        ++counters_.miss_drops;
        ForwardDecision d;
        d.verdict = ForwardDecision::Verdict::Drop;
        d.packet = p;
        return d;
    }

    ++counters_.packet_ins;
    bool installed = packet_in_ && packet_in_(p, in_port);
    if (installed) {
        if (const FlowRule* rule = table_.lookup(p, in_port))
            return apply(*rule, p);
    }
    ++counters_.unhandled_miss;
    ForwardDecision d;
    d.verdict = ForwardDecision::Verdict::Unhandled;
    d.packet = p;
    return d;
}

} // namespace vhsim
