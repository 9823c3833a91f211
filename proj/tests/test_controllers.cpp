#include "doctest.h"

#include <string>

#include "vhsim/controllers.hpp"

using namespace vhsim;

namespace {

// One side of an a<->b session, a's point of view, path over bluetooth.
LocalDb session_db() {
    LocalDb db;
    db.self_id = "a";
    db.self_virt = {MacAddress::parse("02:00:00:99:00:01"), IpAddress::parse("10.99.0.1/24")};
    db.self_wifi = {MacAddress::parse("02:00:00:01:00:01"), IpAddress::parse("10.1.0.1/24")};
    db.self_bt = {MacAddress::parse("02:00:00:02:00:01"), IpAddress::parse("10.2.0.1/24")};

    PeerRecord& b = db.peer("b");
    b.peer_id = "b";
    b.virt = {MacAddress::parse("02:00:00:99:00:02"), IpAddress::parse("10.99.0.2/24")};
    b.wifi.addr = {MacAddress::parse("02:00:00:01:00:02"), IpAddress::parse("10.1.0.2/24")};
    b.wifi.known = b.wifi.reachable = true;
    b.bt.addr = {MacAddress::parse("02:00:00:02:00:02"), IpAddress::parse("10.2.0.2/24")};
    b.bt.known = b.bt.reachable = true;
    b.exchange_done = true;
    b.path_kind = InterfaceKind::Bluetooth;
    b.nexthop = b.bt.addr;
    db.bind_port(5001, "b");
    return db;
}

Packet flow_packet(const LocalDb& db) {
    Packet p;
    p.src_mac = db.self_virt.mac;
    p.dst_mac = db.find_peer("b")->virt.mac;
    p.src_ip = db.self_virt.ip;
    p.dst_ip = db.find_peer("b")->virt.ip;
    p.protocol = Protocol::UDP;
    p.src_port = 5001;
    p.dst_port = 5001;
    p.size_bytes = 500;
    return p;
}

} // namespace

TEST_CASE("virtual port miss synthesizes an outbound/inbound pair") {
    LocalDb db = session_db();
    std::uint64_t id = 1;
    Packet p = flow_packet(db);
    SynthesisResult r = synthesize_rules(db, p, Port::Virtual, SimTime{10},
                                         RuleOrigin::LocalController, id);
    REQUIRE(r.failure.empty());
    REQUIRE(r.rules.size() == 2);

    const FlowRule& out = r.rules[0];
    CHECK(out.match.in_port == Port::Virtual);
    CHECK(out.match.ip_dst->same_host(IpAddress::parse("10.99.0.2")));
    CHECK(out.match.dst_port == 5001);
    REQUIRE(out.actions.size() == 5);
    CHECK(out.actions[1].mac == MacAddress::parse("02:00:00:02:00:02"));
    CHECK(out.actions[4].kind == FlowAction::Kind::Output);
    CHECK(out.actions[4].port == Port::Bluetooth);

    const FlowRule& in = r.rules[1];
    CHECK(in.match.in_port == Port::Bluetooth);
    CHECK(in.actions.back().port == Port::Virtual);
    // the inbound rewrite restores both virtual endpoints
    CHECK(in.actions[0].mac == db.find_peer("b")->virt.mac);
    CHECK(in.actions[1].mac == db.self_virt.mac);

    // the pair covers its own packets: the rewritten outbound frame entering
    // on the peer path port matches the inbound rule
    CHECK(in.match.matches(p, Port::Bluetooth));
}

TEST_CASE("unknown destination reports unknown_peer") {
    LocalDb db = session_db();
    std::uint64_t id = 1;
    Packet p = flow_packet(db);
    p.dst_ip = IpAddress::parse("10.99.0.77/24");
    SynthesisResult r = synthesize_rules(db, p, Port::Virtual, SimTime{10},
                                         RuleOrigin::LocalController, id);
    CHECK(r.failure == "unknown_peer");
    CHECK(r.rules.empty());

    p = flow_packet(db);
    p.dst_port = 6666; // no binding for that flow port
    r = synthesize_rules(db, p, Port::Bluetooth, SimTime{10},
                         RuleOrigin::LocalController, id);
    CHECK(r.failure == "unknown_peer");
}

TEST_CASE("local and extended synthesis agree field by field") {
    LocalDb db = session_db();
    Packet p = flow_packet(db);
    std::uint64_t id_a = 1, id_b = 100;
    SynthesisResult local = synthesize_rules(db, p, Port::Virtual, SimTime{5},
                                             RuleOrigin::LocalController, id_a);
    SynthesisResult ext = synthesize_rules(db, p, Port::Virtual, SimTime{900},
                                           RuleOrigin::ExtendedController, id_b);
    REQUIRE(local.rules.size() == ext.rules.size());
    for (std::size_t i = 0; i < local.rules.size(); ++i) {
        CHECK(same_forwarding(local.rules[i], ext.rules[i]));
        CHECK(local.rules[i].origin == RuleOrigin::LocalController);
        CHECK(ext.rules[i].origin == RuleOrigin::ExtendedController);
    }
}

TEST_CASE("relay binding synthesizes both leg rules") {
    LocalDb db = session_db(); // acting as the relay now
    RelayBinding rb;
    rb.port = 6001;
    rb.a_id = "c3";
    rb.b_id = "c1";
    rb.a_kind = InterfaceKind::WiFi;
    rb.b_kind = InterfaceKind::Bluetooth;
    rb.a_addr = {MacAddress::parse("02:00:00:01:00:03"), IpAddress::parse("10.1.0.3/24")};
    rb.b_addr = {MacAddress::parse("02:00:00:02:00:04"), IpAddress::parse("10.2.0.4/24")};
    db.add_relay_binding(rb);

    Packet p = flow_packet(db);
    p.dst_port = 6001;
    std::uint64_t id = 1;
    SynthesisResult r = synthesize_rules(db, p, Port::WiFi, SimTime{10},
                                         RuleOrigin::LocalController, id);
    REQUIRE(r.failure.empty());
    REQUIRE(r.rules.size() == 2);
    CHECK(r.rules[0].match.in_port == Port::WiFi);
    CHECK(r.rules[0].actions.back().port == Port::Bluetooth);
    CHECK(r.rules[0].actions[1].mac == rb.b_addr.mac); // rewritten to the bt endpoint
    CHECK(r.rules[1].match.in_port == Port::Bluetooth);
    CHECK(r.rules[1].actions.back().port == Port::WiFi);
    CHECK(r.rules[1].actions[1].mac == rb.a_addr.mac);
}

TEST_CASE("controller stack escalates to the fallback path when dead") {
    LocalDb db = session_db();
    FlowSwitch fs;
    ControllerStack cs;
    Packet p = flow_packet(db);

    CHECK(cs.handle_packet_in(db, fs, p, Port::Virtual, SimTime{10}));
    CHECK(cs.counters.packet_ins == 1);
    CHECK(cs.counters.local_installs == 1);
    CHECK(cs.counters.fallback_installs == 0);
    CHECK(fs.table().rules().size() == 2);
    CHECK(fs.table().rules()[0].origin == RuleOrigin::LocalController);

    cs.liveness.state = ControllerState::Dead;
    Packet p2 = p;
    p2.dst_port = 5002;
    db.bind_port(5002, "b");
    CHECK(cs.handle_packet_in(db, fs, p2, Port::Virtual, SimTime{20}));
    CHECK(cs.counters.fallback_installs == 1);
    CHECK(fs.table().rules().size() == 4);
    CHECK(fs.table().rules()[2].origin == RuleOrigin::ExtendedController);

    Packet p3 = p;
    p3.dst_ip = IpAddress::parse("10.99.0.77/24");
    CHECK_FALSE(cs.handle_packet_in(db, fs, p3, Port::Virtual, SimTime{30}));
    CHECK(cs.counters.unknown_peer == 1);
}

TEST_CASE("reinstalling a port's rules follows the flipped path") {
    LocalDb db = session_db();
    FlowSwitch fs;
    ControllerStack cs;
    Packet p = flow_packet(db);
    cs.handle_packet_in(db, fs, p, Port::Virtual, SimTime{10});
    REQUIRE(fs.table().rules().size() == 2);
    CHECK(fs.table().rules()[0].actions[4].port == Port::Bluetooth);

    PeerRecord& b = db.peer("b");
    b.path_kind = InterfaceKind::WiFi;
    b.nexthop = b.wifi.addr;
    cs.reinstall_port_rules(db, fs, "b", 5001, SimTime{600});

    // Egress replaced, new ingress added; the old bluetooth ingress survives
    // so in-flight stragglers still match until the interface goes down.
    REQUIRE(fs.table().rules().size() == 3);
    std::size_t egress = 0, bt_in = 0, wifi_in = 0;
    for (const FlowRule& r : fs.table().rules()) {
        if (r.match.in_port == Port::Virtual) {
            ++egress;
            CHECK(r.actions[4].port == Port::WiFi);
            CHECK(r.actions[1].mac == b.wifi.addr.mac);
            CHECK(r.installed_at.us == 600);
        } else if (r.match.in_port == Port::Bluetooth) {
            ++bt_in;
            CHECK(r.installed_at.us == 10);
        } else if (r.match.in_port == Port::WiFi) {
            ++wifi_in;
            CHECK(r.installed_at.us == 600);
        }
    }
    CHECK(egress == 1);
    CHECK(bt_in == 1);
    CHECK(wifi_in == 1);

    // Reinstalling again on the same path does not stack further copies.
    cs.reinstall_port_rules(db, fs, "b", 5001, SimTime{700});
    CHECK(fs.table().rules().size() == 3);
}

TEST_CASE("local db lookups, rtt smoothing and dump") {
    LocalDb db = session_db();
    CHECK(db.find_peer("b") != nullptr);
    CHECK(db.find_peer("zz") == nullptr);
    CHECK(db.find_peer_by_virtual_ip(IpAddress::parse("10.99.0.2")) == db.find_peer("b"));
    CHECK(db.find_peer_by_virtual_ip(IpAddress::parse("10.99.0.9")) == nullptr);
    CHECK(db.find_peer_by_port(5001) == db.find_peer("b"));
    CHECK(db.find_peer_by_port(9999) == nullptr);

    // first sample adopts, later samples move by 1/8 of the error
    db.note_rtt_sample("b", 40000.0);
    CHECK(db.find_peer("b")->rtt_us == doctest::Approx(40000.0));
    db.note_rtt_sample("b", 48000.0);
    CHECK(db.find_peer("b")->rtt_us == doctest::Approx(41000.0));

    std::string d = db.dump();
    CHECK(d.find("b") != std::string::npos);
    CHECK(d.find("10.99.0.2") != std::string::npos);
    CHECK(d.find('\n') != std::string::npos);
}
