#include "vhsim/flow_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace vhsim {

const char* port_name(Port p)
{
    switch (p) {
    case Port::Virtual:   return "virtual";
    case Port::WiFi:      return "wifi";
    case Port::Bluetooth: return "bluetooth";
    }
    return "unknown";
}

bool MatchFields::matches(const Packet& p, Port in) const
{
    if (in_port && *in_port != in)
        return false;
    if (eth_src && *eth_src != p.src_mac)
        return false;
    if (eth_dst && *eth_dst != p.dst_mac)
        return false;
    if (ip_src && !ip_src->same_host(p.src_ip))
        return false;
    if (ip_dst && !ip_dst->same_host(p.dst_ip))
        return false;
    if (protocol && *protocol != p.protocol)
        return false;
    if (src_port && *src_port != p.src_port)
        return false;
    if (dst_port && *dst_port != p.dst_port)
        return false;
    return true;
}

std::string MatchFields::to_string() const
{
    std::string out;
    auto put = [&out](const std::string& field) {
        if (!out.empty())
            out += ',';
        out += field;
    };
    if (in_port)
        put(std::string("in_port=") + port_name(*in_port));
    if (eth_src)
        put("eth_src=" + eth_src->to_string());
    if (eth_dst)
        put("eth_dst=" + eth_dst->to_string());
    if (ip_src)
        put("ip_src=" + ip_src->host_string());
    if (ip_dst)
        put("ip_dst=" + ip_dst->host_string());
    if (protocol)
        put(std::string("proto=") + protocol_name(*protocol));
    if (src_port)
        put("src_port=" + std::to_string(*src_port));
    if (dst_port)
        put("dst_port=" + std::to_string(*dst_port));
    return out.empty() ? "*" : out;
}

std::string FlowAction::to_string() const
{
    switch (kind) {
    case Kind::Output:    return std::string("output:") + port_name(port);
    case Kind::SetEthSrc: return "set_eth_src:" + mac.to_string();
    case Kind::SetEthDst: return "set_eth_dst:" + mac.to_string();
    case Kind::SetIpSrc:  return "set_ip_src:" + ip.host_string();
    case Kind::SetIpDst:  return "set_ip_dst:" + ip.host_string();
    case Kind::Drop:      return "drop";
    }
    return "unknown";
}

bool FlowAction::operator==(const FlowAction& other) const
{
    if (kind != other.kind)
        return false;
    switch (kind) {
    case Kind::Output:    return port == other.port;
    case Kind::SetEthSrc:
    case Kind::SetEthDst: return mac == other.mac;
    case Kind::SetIpSrc:
    case Kind::SetIpDst:  return ip.same_host(other.ip);
    case Kind::Drop:      return true;
    }
    return false;
}

const char* origin_name(RuleOrigin o)
{
    return o == RuleOrigin::LocalController ? "local" : "extended";
}

void FlowRule::validate() const
{
    int outputs = 0;
    for (const auto& a : actions) {
        if (a.kind == FlowAction::Kind::Output)
            ++outputs;
    }
    if (outputs > 1)
        throw std::invalid_argument("rule has more than one output action");
}

bool same_forwarding(const FlowRule& a, const FlowRule& b)
{
    auto opt_ip_eq = [](const std::optional<IpAddress>& x,
                        const std::optional<IpAddress>& y) {
        if (x.has_value() != y.has_value())
            return false;
        return !x || x->same_host(*y);
    };
    return a.priority == b.priority && a.actions == b.actions
           && a.match.in_port == b.match.in_port
           && a.match.eth_src == b.match.eth_src
           && a.match.eth_dst == b.match.eth_dst
           && opt_ip_eq(a.match.ip_src, b.match.ip_src)
           && opt_ip_eq(a.match.ip_dst, b.match.ip_dst)
           && a.match.protocol == b.match.protocol
           && a.match.src_port == b.match.src_port
           && a.match.dst_port == b.match.dst_port;
}

void FlowTable::install(FlowRule rule)
{
    rule.validate();
    for (const auto& r : rules_) {
        if (r.rule_id == rule.rule_id)
            throw std::invalid_argument("duplicate rule_id");
    }
    rules_.push_back(std::move(rule));
}

const FlowRule* FlowTable::lookup(const Packet& p, Port in_port) const
{
    const FlowRule* best = nullptr;
    for (const auto& r : rules_) {
        if (!r.match.matches(p, in_port))
            continue;
        if (!best) {
            best = &r;
            continue;
        }
        if (r.priority != best->priority) {
            if (r.priority > best->priority)
                best = &r;
        } else if (r.installed_at != best->installed_at) {
            if (best->installed_at < r.installed_at)
                best = &r;
        } else if (r.rule_id < best->rule_id) {
            best = &r;
        }
    }
    return best;
}

std::size_t FlowTable::remove_where(const std::function<bool(const FlowRule&)>& pred)
{
    std::size_t before = rules_.size();
    rules_.erase(std::remove_if(rules_.begin(), rules_.end(), pred), rules_.end());
    return before - rules_.size();
}

std::string FlowTable::dump() const
{
    std::vector<const FlowRule*> order;
    order.reserve(rules_.size());
    for (const auto& r : rules_)
        order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const FlowRule* a, const FlowRule* b) {
        if (a->priority != b->priority)
            return a->priority > b->priority;
        return a->rule_id < b->rule_id;
    });
    std::string out;
    for (const FlowRule* r : order) {
        out += std::to_string(r->priority);
        out += "  ";
        out += r->match.to_string();
        out += "  ";
        if (r->actions.empty()) {
            out += "drop";
        } else {
            for (std::size_t i = 0; i < r->actions.size(); ++i) {
                if (i)
                    out += ',';
                out += r->actions[i].to_string();
            }
        }
        out += "  ";
        out += origin_name(r->origin);
        out += '\n';
    }
    return out;
}

} // namespace vhsim
