#ifndef VHSIM_FLOW_TABLE_HPP
#define VHSIM_FLOW_TABLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/address.hpp"
#include "vhsim/packet.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

// Switch ports. Applications sit behind the virtual port; the radios are
// physical ports.
enum class Port : std::uint8_t { Virtual = 0, WiFi = 1, Bluetooth = 2 };

const char* port_name(Port p);

// Absent field = wildcard. IP fields match on the host address only.
struct MatchFields {
    std::optional<Port> in_port;
    std::optional<MacAddress> eth_src;
    std::optional<MacAddress> eth_dst;
    std::optional<IpAddress> ip_src;
    std::optional<IpAddress> ip_dst;
    std::optional<Protocol> protocol;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;

    bool matches(const Packet& p, Port in) const;
    std::string to_string() const;
};

struct FlowAction {
    enum class Kind { Output, SetEthSrc, SetEthDst, SetIpSrc, SetIpDst, Drop };

    Kind kind;
    Port port = Port::Virtual;
    MacAddress mac;
    IpAddress ip;

    static FlowAction output(Port p) { return {Kind::Output, p, {}, {}}; }
    static FlowAction set_eth_src(MacAddress m) { return {Kind::SetEthSrc, {}, m, {}}; }
    static FlowAction set_eth_dst(MacAddress m) { return {Kind::SetEthDst, {}, m, {}}; }
    static FlowAction set_ip_src(IpAddress i) { return {Kind::SetIpSrc, {}, {}, i}; }
    static FlowAction set_ip_dst(IpAddress i) { return {Kind::SetIpDst, {}, {}, i}; }
    static FlowAction drop() { return {Kind::Drop, {}, {}, {}}; }

    std::string to_string() const;
    bool operator==(const FlowAction& other) const;
};

enum class RuleOrigin : std::uint8_t { LocalController, ExtendedController };

const char* origin_name(RuleOrigin o);

struct FlowRule {
    std::uint64_t rule_id = 0;
    std::uint32_t priority = 0;
    MatchFields match;
    std::vector<FlowAction> actions;
    SimTime installed_at;
    RuleOrigin origin = RuleOrigin::LocalController;

    // Throws std::invalid_argument when the rule carries more than one
    // Output action.
    void validate() const;
};

// Equal apart from rule_id, installed_at and origin; used to check that two
// controllers synthesize the same forwarding behavior.
bool same_forwarding(const FlowRule& a, const FlowRule& b);

class FlowTable {
public:
    enum class MissBehavior { AskController, Drop };

    // Throws std::invalid_argument on duplicate rule_id or invalid rule.
    void install(FlowRule rule);

    // Best match: highest priority, then most recent installed_at, then
    // lowest rule_id. Null on miss.
    const FlowRule* lookup(const Packet& p, Port in_port) const;

    std::size_t remove_where(const std::function<bool(const FlowRule&)>& pred);

    const std::vector<FlowRule>& rules() const { return rules_; }
    MissBehavior miss_behavior() const { return miss_; }
    void set_miss_behavior(MissBehavior m) { miss_ = m; }

    // One rule per line: priority, match, actions, origin.
    std::string dump() const;

private:
    std::vector<FlowRule> rules_;
    MissBehavior miss_ = MissBehavior::AskController;
};

} // namespace vhsim

#endif
