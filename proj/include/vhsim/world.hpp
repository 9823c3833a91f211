#ifndef VHSIM_WORLD_HPP
#define VHSIM_WORLD_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vhsim/device.hpp"
#include "vhsim/event_queue.hpp"
#include "vhsim/metrics.hpp"
#include "vhsim/scenario.hpp"
#include "vhsim/traffic.hpp"

namespace vhsim {

// A network at run time: the shared half-duplex channel plus frame counters.
struct NetworkRuntime {
    std::size_t cfg = 0; // index into Scenario::networks
    Channel channel;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_delivered = 0;
    std::uint64_t frames_lost = 0;
};

// Application-level accounting for one flow. Drop buckets name the reason a
// packet left the pipeline; conservation ties them back to the emit count.
struct FlowRuntime {
    std::size_t cfg = 0; // index into Scenario::flows
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t delivered_bits = 0;
    std::map<std::string, std::uint64_t> drops;
    std::uint64_t in_flight = 0; // frames with a pending arrival event
    JitterEstimator jitter;
    std::vector<std::uint64_t> sent_payloads;
    std::vector<std::uint64_t> recv_payloads;
    SpeechPhase speech_phase = SpeechPhase::Silence;

    std::uint64_t dropped() const
    {
        std::uint64_t n = 0;
        for (const auto& [reason, c] : drops)
            n += c;
        return n;
    }
};

// One session = a device pair joined by direct flows; handovers and the
// traffic trigger operate per session.
struct SessionRuntime {
    std::string a, b; // a < b
    ThroughputMeter meter_a;
    ThroughputMeter meter_b;
    std::vector<std::size_t> flow_idx;

    bool d2d_done_a = false; // a holds b's records
    bool d2d_done_b = false;
    SimTime d2d_first_request;
    EventQueue::Handle d2d_retx;

    ThroughputMeter& meter_of(const std::string& id)
    {
        return id == a ? meter_a : meter_b;
    }
    const std::string& peer_of(const std::string& id) const
    {
        return id == a ? b : a;
    }
};

// Whole-scenario simulation. Construction wires devices, networks, flows and
// static provisioning; run() executes the event loop to the horizon and
// freezes the energy ledgers.
class World {
public:
    World(Scenario sc, std::optional<std::uint64_t> seed_override = {});

    void run();

    const Scenario& scenario() const { return sc_; }
    std::uint64_t seed() const { return seed_; }
    SimTime now() const { return queue_.now(); }

    const std::map<std::string, Device>& devices() const { return devices_; }
    Device& device(const std::string& id) { return devices_.at(id); }
    const std::vector<FlowRuntime>& flows() const { return flows_; }
    const std::vector<NetworkRuntime>& networks() const { return nets_; }
    const std::vector<SessionRuntime>& sessions() const { return sessions_; }

    // All committed or aborted handovers, ordered by (started_at, device).
    std::vector<HandoverRecord> handover_records() const;

    // Per-device per-interface energy ledger over [0, duration].
    const std::map<std::string, EnergyLedger>& ledgers() const { return ledgers_; }

    const std::vector<std::string>& violations() const { return violations_; }

    // Packet-in count per (device, flow port, epoch); at most one each.
    const std::map<std::tuple<std::string, std::uint16_t, std::uint64_t>,
                   std::uint64_t>&
    packet_in_counts() const
    {
        return packet_ins_;
    }

    void set_trace(TraceLog* t) { queue_.set_trace(t); }

    EventQueue& queue() { return queue_; }
    SimRng& rng() { return rng_; }

private:
    // wiring
    void build_devices();
    void build_networks();
    void build_sessions();
    void provision_relays();
    void schedule_bootstrap();
    void schedule_flows();
    void schedule_script();
    void schedule_supervision();

    // traffic
    void emit_packet(std::size_t flow);
    void schedule_cbr(std::size_t flow, SimTime at);
    void speech_phase_change(std::size_t flow, SimTime at);
    void drop(std::size_t flow, const std::string& reason);

    // forwarding
    void inject_at_switch(Device& d, const Packet& p, Port in,
                          std::optional<std::size_t> flow);
    void transmit_physical(Device& d, InterfaceKind kind, const Packet& p,
                           std::optional<std::size_t> flow);
    void transmit_on_network(std::size_t net, Device& from,
                             const std::string& to_id, const Packet& p,
                             InterfaceKind kind, std::optional<std::size_t> flow);
    void plan_hop(std::size_t net, Device& to, const Packet& p,
                  InterfaceKind kind, std::optional<std::size_t> flow,
                  bool final_hop);
    void deliver_local(Device& d, Packet p, InterfaceKind kind,
                       std::optional<std::size_t> flow);
    void deliver_to_app(Device& d, const Packet& p, std::size_t flow);
    void touch(Device& d, InterfaceKind kind);
    void idle_check(const std::string& id, InterfaceKind kind);

    // control plane
    struct ControlPayload {
        enum class Kind { D2dRequest, D2dResponse, HandoverRequest, Syn, ArpAdvert };
        Kind kind = Kind::Syn;
        std::string sender;
        HandoverDirection dir = HandoverDirection::WiFiToBluetooth;
        std::uint64_t epoch = 0;
        SimTime request_sent; // first-send time of the D2D request
        InterfaceKind advert_kind = InterfaceKind::WiFi;
    };

    void send_control(Device& from, const std::string& to_id, InterfaceKind kind,
                      std::uint32_t size_bytes, ControlPayload payload);
    std::optional<InterfaceKind> control_path(Device& from, const std::string& to_id,
                                              InterfaceKind preferred);
    void dispatch_control(Device& d, const Packet& p, InterfaceKind kind);
    void start_d2d(std::size_t session);
    void d2d_retransmit(std::size_t session);
    void fill_peer_records(Device& learner, const Device& about, InterfaceKind path);
    bool on_arp(Device& d, const Packet& p, Port in);
    bool on_packet_in(Device& d, const Packet& p, Port in);

    // handover machine
    bool maybe_start_handover(Device& d, HandoverDirection dir,
                              std::uint64_t epoch_hint);
    void on_backup_awake(Device& d, std::uint64_t epoch);
    void enter_synchronizing(Device& d);
    void send_syn(Device& d);
    void on_syn(Device& d, const std::string& from, HandoverDirection dir,
                std::uint64_t epoch);
    void on_handover_request(Device& d, const std::string& from,
                             HandoverDirection dir, std::uint64_t epoch);
    void check_commit(Device& d);
    void start_commit(Device& d);
    void on_rule_installed(Device& d, std::uint64_t epoch);
    void on_config_done(Device& d, std::uint64_t epoch);
    void finish_commit(Device& d);
    void abort_handover(Device& d, const std::string& reason);
    void cancel_handover_timers(Device& d);
    void flip_path(Device& d);
    void send_gratuitous_arp(Device& d);

    // supervision
    void supervision_tick(std::uint64_t k);
    bool bt_mutual_range(const SessionRuntime& s, double t_s) const;
    bool wifi_mutual_range(const SessionRuntime& s, double t_s) const;
    bool hub_path_ok(const NetworkConfig& n, const std::string& x,
                     const std::string& y, double t_s) const;

    SessionRuntime* session_of(const std::string& device_id);
    std::size_t flow_by_port(std::uint16_t port) const;
    Device* device_by_mac(std::size_t net, const MacAddress& mac,
                          InterfaceKind kind);
    void violation(const std::string& what);
    void finalize();

    Scenario sc_;
    std::uint64_t seed_;
    EventQueue queue_;
    SimRng rng_;
    PayloadIdSource ids_;

    std::map<std::string, Device> devices_;
    std::vector<NetworkRuntime> nets_;
    std::vector<FlowRuntime> flows_;
    std::vector<SessionRuntime> sessions_;
    std::map<std::uint16_t, std::size_t> port_flows_;
    std::map<std::uint64_t, ControlPayload> control_;
    std::map<std::tuple<std::string, std::uint16_t, std::uint64_t>, std::uint64_t>
        packet_ins_;
    std::map<std::pair<std::string, std::uint16_t>, bool> pending_fallback_;
    std::map<std::string, EnergyLedger> ledgers_;
    std::vector<std::string> violations_;
    SimTime horizon_;
    bool ran_ = false;
};

} // namespace vhsim

#endif
