#include "doctest.h"

#include <string>

#include "vhsim/scenario.hpp"

using namespace vhsim;

namespace {

const char* kMinimal = R"(# two devices on one piconet
[scenario]
duration_s = 10
seed = 4

[device a]
pos = 0 0
bt_state = sleep

[device b]
pos = 2 0
bt_state = sleep

[piconet p1]
master = a
members = a b

[flow f1]
kind = cbr
from = a
to = b
rate_kbps = 200
packet_bytes = 500
start_s = 1
)";

std::string expect_code(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("minimal scenario parses with defaults filled in") {
    Scenario sc = parse_scenario(kMinimal);
    CHECK(sc.duration_s == 10.0);
    CHECK(sc.seed == 4);
    CHECK(sc.trigger_enabled);
    CHECK(sc.trigger.no_traffic_threshold_kbps == 5.0);
    CHECK(sc.handover.to_bt_rule_ms.kind == Distribution::Kind::ConfigRatio);

    REQUIRE(sc.devices.size() == 2);
    const DeviceConfig& a = sc.devices[0];
    CHECK(a.id == "a");
    CHECK(a.bt_initial == InterfaceState::Sleep);
    CHECK(a.wifi_initial == InterfaceState::Off);
    // auto-assigned distinct addresses on every plane
    CHECK(a.wifi_mac != a.bt_mac);
    CHECK(a.virt_ip != a.wifi_ip);
    CHECK(a.virt_ip != sc.devices[1].virt_ip);
    CHECK(a.wifi_ip.prefix_len == 24);

    REQUIRE(sc.networks.size() == 1);
    CHECK_FALSE(sc.networks[0].is_bss);
    CHECK(sc.networks[0].hub == "a");
    CHECK(sc.networks[0].params.rate_kbps == 700.0); // bluetooth defaults
    CHECK(sc.networks[0].params.range_m == 10.0);

    REQUIRE(sc.flows.size() == 1);
    CHECK(sc.flows[0].dst_port == kFirstFlowPort);
    CHECK(sc.flows[0].stop_s == 10.0); // defaults to the scenario duration
    CHECK(sc.find_device("b") != nullptr);
    CHECK(sc.find_device("zz") == nullptr);
    CHECK(sc.common_network("a", "b") != nullptr);
}

TEST_CASE("explicit addresses and ports are honored") {
    std::string text = kMinimal;
    text += "dst_port = 6000\n";
    text.replace(text.find("pos = 0 0"), 9, "pos = 0 0\nbt_mac = 02:11:22:33:44:55");
    Scenario sc = parse_scenario(text);
    CHECK(sc.devices[0].bt_mac == MacAddress::parse("02:11:22:33:44:55"));
    CHECK(sc.flows[0].dst_port == 6000);
}

TEST_CASE("scenario serialization round trips") {
    Scenario sc = parse_scenario(kMinimal);
    std::string text = serialize_scenario(sc);
    Scenario sc2 = parse_scenario(text);
    CHECK(scenario_equal(sc, sc2));
    CHECK(serialize_scenario(sc2) == text);

    // a richer scenario with bss, relay, waypoints, speech and script
    const char* rich = R"(
[scenario]
duration_s = 30
seed = 9

[trigger]
enabled = false
threshold_s = 4

[handover]
to_wifi_config_ms = const 80
to_bt_config_ms = uniform 90 120

[device a]
pos = 0 0
bt_state = sleep
waypoint = 2 5 5
waypoint = 6 10 0
controller_die_at_s = 3
controller_revive_at_s = 9

[device r]
pos = 1 0
bt_state = sleep
wifi_state = sleep

[device ap]
pos = 3 0
wifi_state = sleep

[device c]
pos = 4 0
wifi_state = sleep

[piconet p]
master = a
members = a r
rate_kbps = 640
jitter_ms = exp 2

[bss w]
ap = ap
members = r c
loss = 0.01

[relay rel]
via = r
a = c
b = a

[flow voice]
kind = speech
from = c
to = a
rate_kbps = 64
packet_bytes = 160
start_s = 1
stop_s = 29
talkspurt_s = 1.1
pause_s = 1.5
mutual_silence_s = 0.5

[script]
force_handover = 5 a to_wifi
)";
    Scenario r1 = parse_scenario(rich);
    Scenario r2 = parse_scenario(serialize_scenario(r1));
    CHECK(scenario_equal(r1, r2));
    CHECK(r1.networks[1].params.loss_prob == 0.01);
    CHECK(r1.flows[0].kind == FlowKind::Speech);
    CHECK(r1.flows[0].speech.mean_talkspurt_s == 1.1);
    CHECK(r1.relays.size() == 1);
    CHECK(r1.script.size() == 1);
    CHECK(r1.script[0].direction == HandoverDirection::BluetoothToWiFi);
    CHECK(r1.devices[0].mobility.waypoints.size() == 2);
}

TEST_CASE("parse errors carry stable codes and line numbers") {
    CHECK(expect_code("[scenario]\nduration_s = 0\n") == "nonpositive_duration");
    CHECK(expect_code("duration_s = 5\n") == "unknown_key");
    CHECK(expect_code("[scenario]\nduration_s = 5\n[gadget x]\n") == "unknown_section");
    CHECK(expect_code("[scenario]\nduration_s = abc\n") == "bad_value");

    try {
        parse_scenario("[scenario]\nduration_s = abc\n");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 2);
        CHECK(e.render().find("line 2") != std::string::npos);
        CHECK(e.render().find("bad_value") != std::string::npos);
    }
}

TEST_CASE("structural validation codes") {
    // duplicate device
    std::string dup = kMinimal;
    dup += "\n[device a]\npos = 9 9\nbt_state = sleep\n";
    CHECK(expect_code(dup) == "duplicate_id");

    // network member that is no device
    std::string dangling = kMinimal;
    dangling.replace(dangling.find("members = a b"), 13, "members = a b ghost");
    CHECK(expect_code(dangling) == "dangling_device");

    // a piconet needs at least two members
    CHECK(expect_code("[scenario]\nduration_s = 5\n[device a]\npos = 0 0\nbt_state = sleep\n"
                      "[piconet p]\nmaster = a\nmembers = a\n") == "network_too_small");

    // piconets cap at eight members
    {
        std::string big = "[scenario]\nduration_s = 5\n";
        std::string members;
        for (char c = 'a'; c <= 'i'; ++c) {
            big += std::string("[device ") + c + "]\npos = 0 0\nbt_state = sleep\n";
            members += c;
            members += ' ';
        }
        big += "[piconet p]\nmaster = a\nmembers = " + members + "\n";
        CHECK(expect_code(big) == "piconet_too_large");
    }

    // sleeping interface without a matching network
    CHECK(expect_code("[scenario]\nduration_s = 5\n[device a]\npos = 0 0\nbt_state = sleep\n"
                      "[device b]\npos = 1 0\nbt_state = sleep\n") ==
          "initial_state_needs_network");

    // flow between devices with no shared network and no relay
    std::string unreachable = kMinimal;
    unreachable += "\n[device c]\npos = 5 0\nwifi_state = off\n"
                   "[flow f2]\nkind = cbr\nfrom = a\nto = c\nrate_kbps = 10\n"
                   "packet_bytes = 100\n";
    CHECK(expect_code(unreachable) == "unreachable_flow");

    // flow to self
    std::string self = kMinimal;
    self.replace(self.find("to = b"), 6, "to = a");
    CHECK(expect_code(self) == "flow_self");

    // packets must fit the minimal framing
    std::string tiny = kMinimal;
    tiny.replace(tiny.find("packet_bytes = 500"), 18, "packet_bytes = 41");
    CHECK(expect_code(tiny) == "undersized_packet");

    // the control port is reserved
    std::string ctl = kMinimal;
    ctl += "dst_port = 7700\n";
    CHECK(expect_code(ctl) == "port_conflict");

    // one device cannot run sessions toward two different peers
    std::string multi = kMinimal;
    multi += "\n[device c]\npos = 3 0\nbt_state = sleep\n";
    multi.replace(multi.find("members = a b"), 13, "members = a b c");
    multi += "[flow f2]\nkind = cbr\nfrom = a\nto = c\nrate_kbps = 10\npacket_bytes = 100\n";
    CHECK(expect_code(multi) == "multiple_sessions");

    // script referencing an unknown device
    std::string script = kMinimal;
    script += "\n[script]\nforce_handover = 2 ghost to_wifi\n";
    CHECK(expect_code(script) == "dangling_device");

    // valid scenarios return no code at all
    CHECK(expect_code(kMinimal).empty());
}

TEST_CASE("relay validation") {
    std::string bad = kMinimal;
    bad += "\n[relay r1]\nvia = a\na = a\nb = b\n";
    CHECK_FALSE(expect_code(bad).empty());

    // relay leg must exist: via shares no network with one endpoint
    std::string legless = kMinimal;
    legless += "\n[device c]\npos = 20 0\nwifi_state = off\n"
               "[relay r1]\nvia = b\na = c\nb = a\n";
    CHECK(expect_code(legless) == "relay_leg_missing");
}

TEST_CASE("duplicate addresses are rejected") {
    std::string text = kMinimal;
    text.replace(text.find("pos = 0 0"), 9, "pos = 0 0\nvirt_ip = 10.99.0.7/24");
    text.replace(text.find("pos = 2 0"), 9, "pos = 2 0\nvirt_ip = 10.99.0.7/24");
    CHECK(expect_code(text) == "duplicate_address");
}
