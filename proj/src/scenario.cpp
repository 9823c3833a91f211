#include "vhsim/scenario.hpp"

#include "vhsim/packet.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace vhsim {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

double parse_double(int line, const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ScenarioError(line, "bad_value", key + ": expected number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(int line, const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        unsigned long long n = std::stoull(v, &used);
        if (used != v.size())
            throw std::invalid_argument("");
        return n;
    } catch (const std::exception&) {
        throw ScenarioError(line, "bad_value", key + ": expected unsigned integer, got '" + v + "'");
    }
}

bool parse_bool(int line, const std::string& key, const std::string& v)
{
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    throw ScenarioError(line, "bad_value", key + ": expected boolean, got '" + v + "'");
}

InterfaceState parse_initial_state(int line, const std::string& key, const std::string& v)
{
    if (v == "off")
        return InterfaceState::Off;
    if (v == "sleep")
        return InterfaceState::Sleep;
    throw ScenarioError(line, "bad_value", key + ": expected off|sleep, got '" + v + "'");
}

Distribution parse_dist(int line, const std::string& key, const std::string& v)
{
    try {
        return Distribution::parse(v);
    } catch (const std::exception& e) {
        throw ScenarioError(line, "bad_value", key + ": " + e.what());
    }
}

MacAddress parse_mac(int line, const std::string& key, const std::string& v)
{
    try {
        return MacAddress::parse(v);
    } catch (const std::exception& e) {
        throw ScenarioError(line, "bad_value", key + ": " + e.what());
    }
}

IpAddress parse_ip(int line, const std::string& key, const std::string& v)
{
    try {
        return IpAddress::parse(v);
    } catch (const std::exception& e) {
        throw ScenarioError(line, "bad_value", key + ": " + e.what());
    }
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Parse-time staging for a device: remembers which addresses were explicit
// so the rest can be auto-assigned from the declaration index.
struct StagedDevice {
    DeviceConfig cfg;
    std::optional<MacAddress> wifi_mac, bt_mac, virt_mac;
    std::optional<IpAddress> wifi_ip, bt_ip, virt_ip;
    int line = 0;
};

struct Parser {
    Scenario sc;
    std::vector<StagedDevice> devices;
    std::vector<int> net_lines, flow_lines, relay_lines;

    enum class Section { None, Scenario, Trigger, Handover, Device, Net, Flow, Relay, Script };
    Section section = Section::None;
    std::size_t index = 0; // element of the current section's vector
    bool saw_scenario = false;

    void begin_section(int line, const std::string& name, const std::string& arg);
    void key_value(int line, const std::string& key, const std::string& value);
    Scenario finish();

private:
    void device_key(int line, StagedDevice& d, const std::string& key, const std::string& v);
    void net_key(int line, NetworkConfig& n, const std::string& key, const std::string& v);
    void flow_key(int line, FlowConfig& f, const std::string& key, const std::string& v);
    void finalize_devices();
    void validate();
};

void Parser::begin_section(int line, const std::string& name, const std::string& arg)
{
    auto need_arg = [&] {
        if (arg.empty())
            throw ScenarioError(line, "missing_required", "[" + name + "] needs an identifier");
    };
    if (name == "scenario") {
        section = Section::Scenario;
        saw_scenario = true;
    } else if (name == "trigger") {
        section = Section::Trigger;
    } else if (name == "handover") {
        section = Section::Handover;
    } else if (name == "device") {
        need_arg();
        section = Section::Device;
        StagedDevice d;
        d.cfg.id = arg;
        d.line = line;
        devices.push_back(d);
        index = devices.size() - 1;
    } else if (name == "piconet" || name == "bss") {
        need_arg();
        section = Section::Net;
        NetworkConfig n;
        n.is_bss = (name == "bss");
        n.id = arg;
        n.params = n.is_bss ? LinkParams::wifi_defaults() : LinkParams::bluetooth_defaults();
        sc.networks.push_back(n);
        net_lines.push_back(line);
        index = sc.networks.size() - 1;
    } else if (name == "flow") {
        need_arg();
        section = Section::Flow;
        FlowConfig f;
        f.id = arg;
        sc.flows.push_back(f);
        flow_lines.push_back(line);
        index = sc.flows.size() - 1;
    } else if (name == "relay") {
        need_arg();
        section = Section::Relay;
        RelayConfig r;
        r.id = arg;
        sc.relays.push_back(r);
        relay_lines.push_back(line);
        index = sc.relays.size() - 1;
    } else if (name == "script") {
        section = Section::Script;
    } else {
        throw ScenarioError(line, "unknown_section", "unknown section [" + name + "]");
    }
}

void Parser::device_key(int line, StagedDevice& d, const std::string& key, const std::string& v)
{
    if (key == "pos") {
        auto parts = split_ws(v);
        if (parts.size() != 2)
            throw ScenarioError(line, "bad_value", "pos: expected 'x y'");
        d.cfg.mobility.x0 = parse_double(line, key, parts[0]);
        d.cfg.mobility.y0 = parse_double(line, key, parts[1]);
    } else if (key == "waypoint") {
        auto parts = split_ws(v);
        if (parts.size() != 3)
            throw ScenarioError(line, "bad_value", "waypoint: expected 't x y'");
        Waypoint w;
        w.t_s = parse_double(line, key, parts[0]);
        w.x = parse_double(line, key, parts[1]);
        w.y = parse_double(line, key, parts[2]);
        if (w.t_s < 0)
            throw ScenarioError(line, "bad_value", "waypoint: negative time");
        d.cfg.mobility.waypoints.push_back(w);
    } else if (key == "wifi_state") {
        d.cfg.wifi_initial = parse_initial_state(line, key, v);
    } else if (key == "bt_state") {
        d.cfg.bt_initial = parse_initial_state(line, key, v);
    } else if (key == "wifi_mac") {
        d.wifi_mac = parse_mac(line, key, v);
    } else if (key == "bt_mac") {
        d.bt_mac = parse_mac(line, key, v);
    } else if (key == "virt_mac") {
        d.virt_mac = parse_mac(line, key, v);
    } else if (key == "wifi_ip") {
        d.wifi_ip = parse_ip(line, key, v);
    } else if (key == "bt_ip") {
        d.bt_ip = parse_ip(line, key, v);
    } else if (key == "virt_ip") {
        d.virt_ip = parse_ip(line, key, v);
    } else if (key == "controller_die_at_s") {
        d.cfg.controller_die_at_s = parse_double(line, key, v);
    } else if (key == "controller_revive_at_s") {
        d.cfg.controller_revive_at_s = parse_double(line, key, v);
    } else {
        throw ScenarioError(line, "unknown_key", "unknown device key '" + key + "'");
    }
}

void Parser::net_key(int line, NetworkConfig& n, const std::string& key, const std::string& v)
{
    if ((key == "master" && !n.is_bss) || (key == "ap" && n.is_bss)) {
        n.hub = v;
    } else if (key == "members") {
        n.members = split_ws(v);
    } else if (key == "rate_kbps") {
        n.params.rate_kbps = parse_double(line, key, v);
    } else if (key == "base_delay_ms") {
        n.params.base_delay_ms = parse_double(line, key, v);
    } else if (key == "jitter_ms") {
        n.params.jitter_ms = parse_dist(line, key, v);
    } else if (key == "loss") {
        n.params.loss_prob = parse_double(line, key, v);
    } else if (key == "range_m") {
        n.params.range_m = parse_double(line, key, v);
    } else {
        throw ScenarioError(line, "unknown_key",
                            std::string("unknown ") + (n.is_bss ? "bss" : "piconet")
                                + " key '" + key + "'");
    }
}

void Parser::flow_key(int line, FlowConfig& f, const std::string& key, const std::string& v)
{
    if (key == "kind") {
        if (v == "cbr")
            f.kind = FlowKind::Cbr;
        else if (v == "speech")
            f.kind = FlowKind::Speech;
        else
            throw ScenarioError(line, "bad_value", "kind: expected cbr|speech");
    } else if (key == "from") {
        f.from = v;
    } else if (key == "to") {
        f.to = v;
    } else if (key == "rate_kbps") {
        f.rate_kbps = parse_double(line, key, v);
    } else if (key == "packet_bytes") {
        f.packet_bytes = static_cast<std::uint32_t>(parse_u64(line, key, v));
    } else if (key == "start_s") {
        f.start_s = parse_double(line, key, v);
    } else if (key == "stop_s") {
        f.stop_s = parse_double(line, key, v);
    } else if (key == "dst_port") {
        f.dst_port = static_cast<std::uint16_t>(parse_u64(line, key, v));
    } else if (key == "talkspurt_s") {
        f.speech.mean_talkspurt_s = parse_double(line, key, v);
    } else if (key == "pause_s") {
        f.speech.mean_pause_s = parse_double(line, key, v);
    } else if (key == "mutual_silence_s") {
        f.speech.mean_mutual_silence_s = parse_double(line, key, v);
    } else {
        throw ScenarioError(line, "unknown_key", "unknown flow key '" + key + "'");
    }
}

void Parser::key_value(int line, const std::string& key, const std::string& v)
{
    switch (section) {
    case Section::None:
        throw ScenarioError(line, "unknown_key", "key outside any section");
    case Section::Scenario:
        if (key == "duration_s")
            sc.duration_s = parse_double(line, key, v);
        else if (key == "seed")
            sc.seed = parse_u64(line, key, v);
        else
            throw ScenarioError(line, "unknown_key", "unknown scenario key '" + key + "'");
        break;
    case Section::Trigger:
        if (key == "enabled")
            sc.trigger_enabled = parse_bool(line, key, v);
        else if (key == "no_traffic_kbps")
            sc.trigger.no_traffic_threshold_kbps = parse_double(line, key, v);
        else if (key == "threshold_s")
            sc.trigger.threshold_wb_s = parse_double(line, key, v);
        else if (key == "period_s")
            sc.trigger.evaluation_period_s = parse_double(line, key, v);
        else
            throw ScenarioError(line, "unknown_key", "unknown trigger key '" + key + "'");
        break;
    case Section::Handover:
        if (key == "to_wifi_config_ms")
            sc.handover.to_wifi_config_ms = parse_dist(line, key, v);
        else if (key == "to_wifi_rule_ms")
            sc.handover.to_wifi_rule_ms = parse_dist(line, key, v);
        else if (key == "to_bt_config_ms")
            sc.handover.to_bt_config_ms = parse_dist(line, key, v);
        else if (key == "to_bt_rule_ms")
            sc.handover.to_bt_rule_ms = parse_dist(line, key, v);
        else if (key == "sync_timeout_s")
            sc.handover.sync_timeout_s = parse_double(line, key, v);
        else if (key == "initial_rtt_ms")
            sc.handover.initial_rtt_ms = parse_double(line, key, v);
        else if (key == "fallback_install_extra_ms")
            sc.handover.fallback_install_extra_ms = parse_double(line, key, v);
        else
            throw ScenarioError(line, "unknown_key", "unknown handover key '" + key + "'");
        break;
    case Section::Device:
        device_key(line, devices[index], key, v);
        break;
    case Section::Net:
        net_key(line, sc.networks[index], key, v);
        break;
    case Section::Flow:
        flow_key(line, sc.flows[index], key, v);
        break;
    case Section::Relay: {
        RelayConfig& r = sc.relays[index];
        if (key == "via")
            r.via = v;
        else if (key == "a")
            r.a = v;
        else if (key == "b")
            r.b = v;
        else
            throw ScenarioError(line, "unknown_key", "unknown relay key '" + key + "'");
        break;
    }
    case Section::Script:
        if (key == "force_handover") {
            auto parts = split_ws(v);
            if (parts.size() != 3)
                throw ScenarioError(line, "bad_value",
                                    "force_handover: expected 't device to_wifi|to_bluetooth'");
            ForcedHandover fh;
            fh.t_s = parse_double(line, key, parts[0]);
            fh.device = parts[1];
            if (parts[2] == "to_wifi")
                fh.direction = HandoverDirection::BluetoothToWiFi;
            else if (parts[2] == "to_bluetooth")
                fh.direction = HandoverDirection::WiFiToBluetooth;
            else
                throw ScenarioError(line, "bad_value",
                                    "force_handover: direction must be to_wifi|to_bluetooth");
            sc.script.push_back(fh);
        } else {
            throw ScenarioError(line, "unknown_key", "unknown script key '" + key + "'");
        }
        break;
    }
}

void Parser::finalize_devices()
{
    if (devices.size() > 200)
        throw ScenarioError(0, "too_many_devices", "at most 200 devices supported");
    for (std::size_t i = 0; i < devices.size(); ++i) {
        StagedDevice& d = devices[i];
        std::uint64_t n = i + 1;
        d.cfg.wifi_mac = d.wifi_mac.value_or(MacAddress{0x020000000100ull | n});
        d.cfg.bt_mac = d.bt_mac.value_or(MacAddress{0x020000000200ull | n});
        d.cfg.virt_mac = d.virt_mac.value_or(MacAddress{0x020000009900ull | n});
        auto ip = [&](std::uint32_t base) {
            return IpAddress{base | static_cast<std::uint32_t>(n), 24};
        };
        d.cfg.wifi_ip = d.wifi_ip.value_or(ip(0x0a010000));  // 10.1.0.n
        d.cfg.bt_ip = d.bt_ip.value_or(ip(0x0a020000));      // 10.2.0.n
        d.cfg.virt_ip = d.virt_ip.value_or(ip(0x0a630000));  // 10.99.0.n
        std::sort(d.cfg.mobility.waypoints.begin(), d.cfg.mobility.waypoints.end(),
                  [](const Waypoint& a, const Waypoint& b) { return a.t_s < b.t_s; });
        sc.devices.push_back(d.cfg);
    }
}

void Parser::validate()
{
    if (!saw_scenario)
        throw ScenarioError(0, "missing_required", "no [scenario] section");
    if (sc.duration_s <= 0)
        throw ScenarioError(0, "nonpositive_duration", "duration_s must be positive");
    if (sc.trigger.no_traffic_threshold_kbps <= 0 || sc.trigger.threshold_wb_s <= 0
        || sc.trigger.evaluation_period_s <= 0)
        throw ScenarioError(0, "bad_value", "trigger parameters must be positive");
    if (sc.handover.sync_timeout_s <= 0 || sc.handover.initial_rtt_ms <= 0
        || sc.handover.fallback_install_extra_ms < 0)
        throw ScenarioError(0, "bad_value", "handover timing parameters out of range");
    if (sc.handover.to_wifi_config_ms.kind == Distribution::Kind::ConfigRatio
        || sc.handover.to_bt_config_ms.kind == Distribution::Kind::ConfigRatio)
        throw ScenarioError(0, "bad_value", "config duration cannot be config_ratio");

    std::set<std::string> dev_ids;
    std::set<std::string> macs, ips;
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const DeviceConfig& d = sc.devices[i];
        int line = devices[i].line;
        if (!dev_ids.insert(d.id).second)
            throw ScenarioError(line, "duplicate_id", "duplicate device '" + d.id + "'");
        for (const MacAddress& m : {d.wifi_mac, d.bt_mac, d.virt_mac}) {
            if (!macs.insert(m.to_string()).second)
                throw ScenarioError(line, "duplicate_address",
                                    "MAC " + m.to_string() + " assigned twice");
        }
        for (const IpAddress& a : {d.wifi_ip, d.bt_ip, d.virt_ip}) {
            if (!ips.insert(a.host_string()).second)
                throw ScenarioError(line, "duplicate_address",
                                    "IP " + a.host_string() + " assigned twice");
        }
        if (d.controller_die_at_s && d.controller_revive_at_s
            && *d.controller_revive_at_s <= *d.controller_die_at_s)
            throw ScenarioError(line, "bad_value", "controller revival precedes death");
    }

    auto require_device = [&](int line, const std::string& id, const std::string& where) {
        if (!dev_ids.count(id))
            throw ScenarioError(line, "dangling_device",
                                where + " references unknown device '" + id + "'");
    };

    std::set<std::string> net_ids;
    std::map<std::string, int> piconet_count, bss_count;
    for (std::size_t i = 0; i < sc.networks.size(); ++i) {
        NetworkConfig& n = sc.networks[i];
        int line = net_lines[i];
        if (!net_ids.insert(n.id).second)
            throw ScenarioError(line, "duplicate_id", "duplicate network '" + n.id + "'");
        if (n.hub.empty())
            throw ScenarioError(line, "missing_required",
                                n.is_bss ? "bss needs ap" : "piconet needs master");
        if (std::find(n.members.begin(), n.members.end(), n.hub) == n.members.end())
            n.members.push_back(n.hub);
        std::set<std::string> seen;
        for (const auto& m : n.members) {
            require_device(line, m, "network " + n.id);
            if (!seen.insert(m).second)
                throw ScenarioError(line, "duplicate_member",
                                    "device '" + m + "' listed twice in " + n.id);
            (n.is_bss ? bss_count[m] : piconet_count[m])++;
        }
        if (n.members.size() < 2)
            throw ScenarioError(line, "network_too_small", n.id + " needs two members");
        if (!n.is_bss && n.members.size() > 8)
            throw ScenarioError(line, "piconet_too_large",
                                "piconet " + n.id + " exceeds 1 master + 7 clients");
        if (n.params.rate_kbps <= 0)
            throw ScenarioError(line, "nonpositive_rate", n.id + ": rate_kbps must be positive");
        if (n.params.base_delay_ms < 0 || n.params.range_m <= 0
            || n.params.loss_prob < 0 || n.params.loss_prob > 1)
            throw ScenarioError(line, "bad_value", n.id + ": link parameter out of range");
    }
    for (const auto& [id, c] : piconet_count) {
        if (c > 1)
            throw ScenarioError(0, "device_in_two_piconets",
                                "device '" + id + "' is in " + std::to_string(c) + " piconets");
    }
    for (const auto& [id, c] : bss_count) {
        if (c > 1)
            throw ScenarioError(0, "device_in_two_bsses",
                                "device '" + id + "' is in " + std::to_string(c) + " BSSes");
    }

    for (std::size_t i = 0; i < sc.devices.size(); ++i) {
        const DeviceConfig& d = sc.devices[i];
        int line = devices[i].line;
        auto in_net = [&](bool bss) {
            for (const auto& n : sc.networks) {
                if (n.is_bss == bss
                    && std::find(n.members.begin(), n.members.end(), d.id) != n.members.end())
                    return true;
            }
            return false;
        };
        if (d.wifi_initial == InterfaceState::Sleep && !in_net(true))
            throw ScenarioError(line, "initial_state_needs_network",
                                d.id + ": wifi_state=sleep without a BSS membership");
        if (d.bt_initial == InterfaceState::Sleep && !in_net(false))
            throw ScenarioError(line, "initial_state_needs_network",
                                d.id + ": bt_state=sleep without a piconet membership");
    }

    std::set<std::string> relay_ids, relay_vias;
    std::set<std::pair<std::string, std::string>> relay_pairs;
    for (std::size_t i = 0; i < sc.relays.size(); ++i) {
        const RelayConfig& r = sc.relays[i];
        int line = relay_lines[i];
        if (!relay_ids.insert(r.id).second)
            throw ScenarioError(line, "duplicate_id", "duplicate relay '" + r.id + "'");
        for (const auto& id : {r.via, r.a, r.b})
            require_device(line, id, "relay " + r.id);
        if (r.via == r.a || r.via == r.b || r.a == r.b)
            throw ScenarioError(line, "bad_value", "relay endpoints must be distinct");
        const NetworkConfig* leg_a = sc.common_network(r.via, r.a);
        const NetworkConfig* leg_b = sc.common_network(r.via, r.b);
        if (!leg_a || !leg_b)
            throw ScenarioError(line, "relay_leg_missing",
                                "relay " + r.id + ": a leg has no shared network");
        if (leg_a->id == leg_b->id)
            throw ScenarioError(line, "relay_same_network",
                                "relay " + r.id + ": both legs share one network");
        relay_vias.insert(r.via);
        relay_pairs.insert(std::minmax(r.a, r.b));
    }

    std::set<std::string> flow_ids;
    std::set<std::uint16_t> ports;
    for (std::size_t i = 0; i < sc.flows.size(); ++i) {
        FlowConfig& f = sc.flows[i];
        int line = flow_lines[i];
        if (!flow_ids.insert(f.id).second)
            throw ScenarioError(line, "duplicate_id", "duplicate flow '" + f.id + "'");
        require_device(line, f.from, "flow " + f.id);
        require_device(line, f.to, "flow " + f.id);
        if (f.from == f.to)
            throw ScenarioError(line, "flow_self", "flow " + f.id + ": from equals to");
        if (f.rate_kbps <= 0)
            throw ScenarioError(line, "nonpositive_rate",
                                "flow " + f.id + ": rate_kbps must be positive");
        if (f.packet_bytes < kMinPacketBytes)
            throw ScenarioError(line, "undersized_packet",
                                "flow " + f.id + ": packet_bytes below "
                                    + std::to_string(kMinPacketBytes));
        if (f.stop_s == 0.0)
            f.stop_s = sc.duration_s;
        if (f.start_s < 0 || f.stop_s <= f.start_s || f.stop_s > sc.duration_s)
            throw ScenarioError(line, "bad_value", "flow " + f.id + ": bad start/stop span");
        if (f.kind == FlowKind::Speech
            && (f.speech.mean_talkspurt_s <= 0 || f.speech.mean_pause_s <= 0
                || f.speech.mean_mutual_silence_s <= 0))
            throw ScenarioError(line, "bad_value", "flow " + f.id + ": speech means must be positive");
        if (f.dst_port != 0) {
            if (f.dst_port == kControlPort || !ports.insert(f.dst_port).second)
                throw ScenarioError(line, "port_conflict",
                                    "flow " + f.id + ": dst_port collides");
        }
        bool relayed = relay_pairs.count(std::minmax(f.from, f.to)) > 0;
        if (!relayed && !sc.common_network(f.from, f.to))
            throw ScenarioError(line, "unreachable_flow",
                                "flow " + f.id + ": endpoints share no network and no relay");
    }
    std::uint16_t next_port = kFirstFlowPort;
    for (auto& f : sc.flows) {
        if (f.dst_port == 0) {
            while (ports.count(next_port) || next_port == kControlPort)
                ++next_port;
            f.dst_port = next_port;
            ports.insert(next_port);
        }
    }

    // Handover sessions: device pairs joined by a direct (non-relayed) flow.
    std::map<std::string, std::set<std::string>> session_peers;
    for (const auto& f : sc.flows) {
        if (relay_pairs.count(std::minmax(f.from, f.to)))
            continue;
        session_peers[f.from].insert(f.to);
        session_peers[f.to].insert(f.from);
    }
    for (const auto& [id, peers] : session_peers) {
        if (peers.size() > 1)
            throw ScenarioError(0, "multiple_sessions",
                                "device '" + id + "' has flows to several peers");
        if (relay_vias.count(id))
            throw ScenarioError(0, "relay_device_in_session",
                                "relay device '" + id + "' also terminates a direct flow");
    }

    for (const auto& fh : sc.script) {
        require_device(0, fh.device, "force_handover");
        if (fh.t_s < 0 || fh.t_s > sc.duration_s)
            throw ScenarioError(0, "bad_value", "force_handover outside scenario span");
    }
}

Scenario Parser::finish()
{
    finalize_devices();
    validate();
    return sc;
}

} // namespace

const DeviceConfig* Scenario::find_device(const std::string& id) const
{
    for (const auto& d : devices) {
        if (d.id == id)
            return &d;
    }
    return nullptr;
}

const NetworkConfig* Scenario::common_network(const std::string& a, const std::string& b,
                                              std::optional<bool> bss_kind) const
{
    for (const auto& n : networks) {
        if (bss_kind && n.is_bss != *bss_kind)
            continue;
        bool has_a = std::find(n.members.begin(), n.members.end(), a) != n.members.end();
        bool has_b = std::find(n.members.begin(), n.members.end(), b) != n.members.end();
        if (has_a && has_b)
            return &n;
    }
    return nullptr;
}

Scenario parse_scenario(const std::string& text)
{
    Parser p;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ScenarioError(line_no, "bad_value", "unterminated section header");
            std::string inner = trim(line.substr(1, line.size() - 2));
            auto parts = split_ws(inner);
            if (parts.empty())
                throw ScenarioError(line_no, "bad_value", "empty section header");
            std::string arg = parts.size() > 1 ? parts[1] : "";
            if (parts.size() > 2)
                throw ScenarioError(line_no, "bad_value", "section header has extra tokens");
            p.begin_section(line_no, parts[0], arg);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(line_no, "bad_value", "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ScenarioError(line_no, "bad_value", "expected 'key = value'");
        p.key_value(line_no, key, value);
    }
    return p.finish();
}

std::string serialize_scenario(const Scenario& sc)
{
    std::string out;
    auto add = [&out](const std::string& s) { out += s; out += '\n'; };

    add("[scenario]");
    add("duration_s = " + fmt17(sc.duration_s));
    add("seed = " + std::to_string(sc.seed));
    add("");
    add("[trigger]");
    add(std::string("enabled = ") + (sc.trigger_enabled ? "true" : "false"));
    add("no_traffic_kbps = " + fmt17(sc.trigger.no_traffic_threshold_kbps));
    add("threshold_s = " + fmt17(sc.trigger.threshold_wb_s));
    add("period_s = " + fmt17(sc.trigger.evaluation_period_s));
    add("");
    add("[handover]");
    add("to_wifi_config_ms = " + sc.handover.to_wifi_config_ms.to_string());
    add("to_wifi_rule_ms = " + sc.handover.to_wifi_rule_ms.to_string());
    add("to_bt_config_ms = " + sc.handover.to_bt_config_ms.to_string());
    add("to_bt_rule_ms = " + sc.handover.to_bt_rule_ms.to_string());
    add("sync_timeout_s = " + fmt17(sc.handover.sync_timeout_s));
    add("initial_rtt_ms = " + fmt17(sc.handover.initial_rtt_ms));
    add("fallback_install_extra_ms = " + fmt17(sc.handover.fallback_install_extra_ms));

    for (const auto& d : sc.devices) {
        add("");
        add("[device " + d.id + "]");
        add("pos = " + fmt17(d.mobility.x0) + " " + fmt17(d.mobility.y0));
        for (const auto& w : d.mobility.waypoints)
            add("waypoint = " + fmt17(w.t_s) + " " + fmt17(w.x) + " " + fmt17(w.y));
        add(std::string("wifi_state = ")
            + (d.wifi_initial == InterfaceState::Sleep ? "sleep" : "off"));
        add(std::string("bt_state = ")
            + (d.bt_initial == InterfaceState::Sleep ? "sleep" : "off"));
        add("wifi_mac = " + d.wifi_mac.to_string());
        add("bt_mac = " + d.bt_mac.to_string());
        add("virt_mac = " + d.virt_mac.to_string());
        add("wifi_ip = " + d.wifi_ip.to_string());
        add("bt_ip = " + d.bt_ip.to_string());
        add("virt_ip = " + d.virt_ip.to_string());
        if (d.controller_die_at_s)
            add("controller_die_at_s = " + fmt17(*d.controller_die_at_s));
        if (d.controller_revive_at_s)
            add("controller_revive_at_s = " + fmt17(*d.controller_revive_at_s));
    }

    for (const auto& n : sc.networks) {
        add("");
        add(std::string("[") + (n.is_bss ? "bss " : "piconet ") + n.id + "]");
        add(std::string(n.is_bss ? "ap = " : "master = ") + n.hub);
        std::string members;
        for (const auto& m : n.members) {
            if (!members.empty())
                members += ' ';
            members += m;
        }
        add("members = " + members);
        add("rate_kbps = " + fmt17(n.params.rate_kbps));
        add("base_delay_ms = " + fmt17(n.params.base_delay_ms));
        add("jitter_ms = " + n.params.jitter_ms.to_string());
        add("loss = " + fmt17(n.params.loss_prob));
        add("range_m = " + fmt17(n.params.range_m));
    }

    for (const auto& f : sc.flows) {
        add("");
        add("[flow " + f.id + "]");
        add(std::string("kind = ") + (f.kind == FlowKind::Cbr ? "cbr" : "speech"));
        add("from = " + f.from);
        add("to = " + f.to);
        add("rate_kbps = " + fmt17(f.rate_kbps));
        add("packet_bytes = " + std::to_string(f.packet_bytes));
        add("start_s = " + fmt17(f.start_s));
        add("stop_s = " + fmt17(f.stop_s));
        add("dst_port = " + std::to_string(f.dst_port));
        if (f.kind == FlowKind::Speech) {
            add("talkspurt_s = " + fmt17(f.speech.mean_talkspurt_s));
            add("pause_s = " + fmt17(f.speech.mean_pause_s));
            add("mutual_silence_s = " + fmt17(f.speech.mean_mutual_silence_s));
        }
    }

    for (const auto& r : sc.relays) {
        add("");
        add("[relay " + r.id + "]");
        add("via = " + r.via);
        add("a = " + r.a);
        add("b = " + r.b);
    }

    if (!sc.script.empty()) {
        add("");
        add("[script]");
        for (const auto& fh : sc.script) {
            add("force_handover = " + fmt17(fh.t_s) + " " + fh.device + " "
                + (fh.direction == HandoverDirection::BluetoothToWiFi ? "to_wifi"
                								: "to_bluetooth"));
        }
    }

    return out;
}

bool scenario_equal(const Scenario& a, const Scenario& b)
{
    return serialize_scenario(a) == serialize_scenario(b);
}

} // namespace vhsim
