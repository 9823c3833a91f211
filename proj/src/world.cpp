#include "vhsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vhsim {

namespace {

constexpr double kIdleTimeoutS = 1.0;
constexpr std::uint32_t kControlBytes = 64;
constexpr std::uint32_t kD2dResponseBytes = 256;
constexpr std::size_t kNoFlow = static_cast<std::size_t>(-1);

bool pending(const EventQueue::Handle& h)
{
    return h && h->action && !h->cancelled;
}

std::pair<std::string, std::string> pair_key(const std::string& x,
                                             const std::string& y)
{
    return x < y ? std::make_pair(x, y) : std::make_pair(y, x);
}

} // namespace

World::World(Scenario sc, std::optional<std::uint64_t> seed_override)
    : sc_(std::move(sc)),
      seed_(seed_override.value_or(sc_.seed)),
      rng_(seed_),
      horizon_(SimTime{sec_to_us(sc_.duration_s)})
{
    build_devices();
    build_networks();
    build_sessions();
    provision_relays();
    schedule_bootstrap();
    schedule_flows();
    schedule_script();
    schedule_supervision();
}

void World::run()
{
    if (ran_)
        throw std::logic_error("world: run() called twice");
    ran_ = true;
    queue_.run_until(horizon_);
    finalize();
}

// ---------------------------------------------------------------- wiring --

void World::build_devices()
{
    for (const DeviceConfig& dc : sc_.devices) {
        Device& d = devices_[dc.id];
        d.id = dc.id;
        d.mobility = dc.mobility;
        d.virt = {dc.virt_mac, dc.virt_ip};
        d.wifi.kind = InterfaceKind::WiFi;
        d.wifi.addr = {dc.wifi_mac, dc.wifi_ip};
        d.wifi.state = dc.wifi_initial;
        d.bt.kind = InterfaceKind::Bluetooth;
        d.bt.addr = {dc.bt_mac, dc.bt_ip};
        d.bt.state = dc.bt_initial;
        d.active_kind = d.bt.powered() ? InterfaceKind::Bluetooth
                                       : InterfaceKind::WiFi;
        d.db.self_id = dc.id;
        d.db.self_virt = d.virt;
        d.db.self_wifi = d.wifi.addr;
        d.db.self_bt = d.bt.addr;
        for (std::size_t ni = 0; ni < sc_.networks.size(); ++ni) {
            const NetworkConfig& n = sc_.networks[ni];
            InterfaceKind k = n.is_bss ? InterfaceKind::WiFi
                                       : InterfaceKind::Bluetooth;
            bool member = std::find(n.members.begin(), n.members.end(), dc.id)
                          != n.members.end();
            if (member && d.iface(k).powered()) {
                d.iface(k).associated = true;
                d.iface(k).configured = true;
                d.iface(k).network = static_cast<int>(ni);
            }
        }
        std::string id = dc.id;
        d.fs.set_arp_handler([this, id](const Packet& p, Port in) {
            return on_arp(devices_.at(id), p, in);
        });
        d.fs.set_packet_in_handler([this, id](const Packet& p, Port in) {
            return on_packet_in(devices_.at(id), p, in);
        });
    }
}

void World::build_networks()
{
    nets_.resize(sc_.networks.size());
    for (std::size_t i = 0; i < nets_.size(); ++i)
        nets_[i].cfg = i;
}

void World::build_sessions()
{
    std::set<std::pair<std::string, std::string>> relayed;
    for (const RelayConfig& r : sc_.relays)
        relayed.insert(pair_key(r.a, r.b));

    std::map<std::pair<std::string, std::string>, std::size_t> by_pair;
    flows_.resize(sc_.flows.size());
    for (std::size_t fi = 0; fi < sc_.flows.size(); ++fi) {
        const FlowConfig& f = sc_.flows[fi];
        flows_[fi].cfg = fi;
        port_flows_[f.dst_port] = fi;
        auto key = pair_key(f.from, f.to);
        if (relayed.count(key))
            continue;
        auto it = by_pair.find(key);
        if (it == by_pair.end()) {
            SessionRuntime s;
            s.a = key.first;
            s.b = key.second;
            sessions_.push_back(std::move(s));
            it = by_pair.emplace(key, sessions_.size() - 1).first;
        }
        sessions_[it->second].flow_idx.push_back(fi);
    }
}

void World::provision_relays()
{
    for (const RelayConfig& r : sc_.relays) {
        const NetworkConfig* leg_a = sc_.common_network(r.via, r.a);
        const NetworkConfig* leg_b = sc_.common_network(r.via, r.b);
        InterfaceKind ka = leg_a->is_bss ? InterfaceKind::WiFi : InterfaceKind::Bluetooth;
        InterfaceKind kb = leg_b->is_bss ? InterfaceKind::WiFi : InterfaceKind::Bluetooth;
        Device& via = devices_.at(r.via);
        Device& da = devices_.at(r.a);
        Device& db = devices_.at(r.b);

        auto provision_endpoint = [this](Device& self, const Device& other,
                                         InterfaceKind leg_kind, const Device& relay) {
            fill_peer_records(self, other, leg_kind);
            PeerRecord& pr = self.db.peer(other.id);
            pr.via = relay.id;
            pr.nexthop = relay.iface(leg_kind).addr;
        };
        provision_endpoint(da, db, ka, via);
        provision_endpoint(db, da, kb, via);

        for (const FlowConfig& f : sc_.flows) {
            if (pair_key(f.from, f.to) != pair_key(r.a, r.b))
                continue;
            RelayBinding b;
            b.port = f.dst_port;
            b.a_id = r.a;
            b.b_id = r.b;
            b.a_kind = ka;
            b.b_kind = kb;
            b.a_addr = da.iface(ka).addr;
            b.b_addr = db.iface(kb).addr;
            via.db.add_relay_binding(b);
        }
    }
}

void World::schedule_bootstrap()
{
    for (std::size_t si = 0; si < sessions_.size(); ++si) {
        queue_.schedule(SimTime{0}, EventKind::TimerExpiry, sessions_[si].a,
                        "d2d-start " + sessions_[si].b,
                        [this, si] { start_d2d(si); });
    }
}

void World::schedule_flows()
{
    for (std::size_t fi = 0; fi < flows_.size(); ++fi) {
        const FlowConfig& f = sc_.flows[fi];
        SimTime start{sec_to_us(f.start_s)};
        if (f.kind == FlowKind::Cbr) {
            schedule_cbr(fi, start);
        } else {
            queue_.schedule(start, EventKind::TimerExpiry, f.from,
                            "speech-phase " + f.id,
                            [this, fi] { speech_phase_change(fi, queue_.now()); });
        }
    }
}

void World::schedule_cbr(std::size_t fi, SimTime at)
{
    const FlowConfig& f = sc_.flows[fi];
    queue_.schedule(at, EventKind::TrafficEmit, f.from, "flow " + f.id,
                    [this, fi] {
                        const FlowConfig& f = sc_.flows[fi];
                        FlowRuntime& rt = flows_[fi];
                        SimTime stop{sec_to_us(f.stop_s)};
                        if (queue_.now() >= stop)
                            return;
                        if (f.kind == FlowKind::Speech
                            && (rt.speech_phase != SpeechPhase::Talkspurt))
                            return;
                        emit_packet(fi);
                        CbrConfig c{f.rate_kbps, f.packet_bytes, {}, {}};
                        SimTime next = queue_.now() + cbr_interval_us(c);
                        if (next < stop)
                            schedule_cbr(fi, next);
                    });
}

void World::speech_phase_change(std::size_t fi, SimTime at)
{
    const FlowConfig& f = sc_.flows[fi];
    FlowRuntime& rt = flows_[fi];
    SimTime stop{sec_to_us(f.stop_s)};
    if (at >= stop)
        return;
    SpeechModelConfig cfg = f.speech;
    cfg.on_rate_kbps = f.rate_kbps;
    SpeechStep step = speech_next_phase(cfg, rng_, rt.speech_phase);
    rt.speech_phase = step.phase;
    SimTime end = at + sec_to_us(step.duration_s);
    if (step.phase == SpeechPhase::Talkspurt)
        schedule_cbr(fi, at);
    if (end < stop) {
        queue_.schedule(end, EventKind::TimerExpiry, f.from, "speech-phase " + f.id,
                        [this, fi, end] { speech_phase_change(fi, end); });
    }
}

void World::schedule_script()
{
    for (const ForcedHandover& fh : sc_.script) {
        queue_.schedule(SimTime{sec_to_us(fh.t_s)}, EventKind::TimerExpiry,
                        fh.device,
                        std::string("forced-handover ") + direction_name(fh.direction),
                        [this, fh] {
                            Device& d = devices_.at(fh.device);
                            maybe_start_handover(d, fh.direction, d.cm.epoch + 1);
                        });
    }
    for (const DeviceConfig& dc : sc_.devices) {
        if (dc.controller_die_at_s) {
            queue_.schedule(SimTime{sec_to_us(*dc.controller_die_at_s)},
                            EventKind::TimerExpiry, dc.id, "controller-death",
                            [this, id = dc.id] {
                                Device& d = devices_.at(id);
                                d.ctrl.liveness.state = ControllerState::Dead;
                                d.ctrl.liveness.died_at = queue_.now();
                            });
        }
        if (dc.controller_revive_at_s) {
            queue_.schedule(SimTime{sec_to_us(*dc.controller_revive_at_s)},
                            EventKind::TimerExpiry, dc.id, "controller-revive",
                            [this, id = dc.id] {
                                Device& d = devices_.at(id);
                                d.ctrl.liveness.state = ControllerState::Alive;
                                d.ctrl.liveness.revived_at = queue_.now();
                            });
        }
    }
}

void World::schedule_supervision()
{
    double period = sc_.trigger.evaluation_period_s;
    for (std::uint64_t k = 1;; ++k) {
        std::uint64_t at = sec_to_us(period * static_cast<double>(k));
        if (SimTime{at} > horizon_)
            break;
        queue_.schedule(SimTime{at}, EventKind::TimerExpiry, "", "supervision",
                        [this, k] { supervision_tick(k); });
    }
}

// --------------------------------------------------------------- traffic --

void World::emit_packet(std::size_t fi)
{
    const FlowConfig& f = sc_.flows[fi];
    FlowRuntime& rt = flows_[fi];
    Device& from = devices_.at(f.from);
    const Device& to = devices_.at(f.to);
    Packet p = make_udp_packet({from.virt.mac, from.virt.ip},
                               {to.virt.mac, to.virt.ip}, f.packet_bytes,
                               queue_.now(), ids_, f.dst_port, f.dst_port);
    ++rt.sent;
    rt.sent_payloads.push_back(p.payload_id);
    if (SessionRuntime* s = session_of(f.from); s && s->peer_of(f.from) == f.to)
        s->meter_of(f.from).add(queue_.now(), std::uint64_t{8} * f.packet_bytes);
    inject_at_switch(from, p, Port::Virtual, fi);
}

void World::drop(std::size_t fi, const std::string& reason)
{
    if (fi == kNoFlow)
        return;
    ++flows_[fi].drops[reason];
}

// ------------------------------------------------------------ forwarding --

void World::inject_at_switch(Device& d, const Packet& p, Port in,
                             std::optional<std::size_t> flow)
{
    std::size_t fi = flow.value_or(kNoFlow);
    ForwardDecision dec = d.fs.process(p, in);
    switch (dec.verdict) {
    case ForwardDecision::Verdict::Forward:
        if (dec.out_port == Port::Virtual) {
            if (fi != kNoFlow)
                deliver_to_app(d, dec.packet, fi);
            else
                violation(d.id + ": non-flow packet forwarded to the virtual port");
        } else {
            transmit_physical(d, kind_of(dec.out_port), dec.packet, flow);
        }
        break;
    case ForwardDecision::Verdict::Drop:
        drop(fi, "switch_drop");
        break;
    case ForwardDecision::Verdict::Unhandled:
        drop(fi, "unhandled_miss");
        break;
    case ForwardDecision::Verdict::ArpHandled:
        break;
    }
}

void World::transmit_physical(Device& d, InterfaceKind kind, const Packet& p,
                              std::optional<std::size_t> flow)
{
    std::size_t fi = flow.value_or(kNoFlow);
    InterfaceRuntime& i = d.iface(kind);
    if (!i.associated || !i.powered()) {
        drop(fi, "iface_down");
        return;
    }
    if (!i.configured) {
        // Rules already steer to the new interface but configuration has not
        // finished: the defining handover loss window, charged to the sender.
        if (d.cm.phase == HandoverPhase::Committing
            && kind == target_kind(d.cm.direction)) {
            ++d.cm.current.lost_packets;
            drop(fi, "handover_window");
        } else {
            drop(fi, "iface_down");
        }
        return;
    }
    if (i.network < 0) {
        drop(fi, "iface_down");
        return;
    }
    touch(d, kind);
    Device* dst = device_by_mac(static_cast<std::size_t>(i.network), p.dst_mac, kind);
    if (!dst) {
        drop(fi, "no_route");
        return;
    }
    transmit_on_network(static_cast<std::size_t>(i.network), d, dst->id, p, kind,
                        flow);
}

void World::transmit_on_network(std::size_t net, Device& from,
                                const std::string& to_id, const Packet& p,
                                InterfaceKind kind,
                                std::optional<std::size_t> flow)
{
    const NetworkConfig& nc = sc_.networks[nets_[net].cfg];
    Device& to = devices_.at(to_id);
    double t_s = us_to_sec(queue_.now().us);
    std::size_t fi = flow.value_or(kNoFlow);

    if (!nc.is_bss || from.id == nc.hub || to_id == nc.hub) {
        if (!in_range(from.pos(t_s), to.pos(t_s), nc.params.range_m)) {
            drop(fi, "out_of_range");
            return;
        }
        plan_hop(net, to, p, kind, flow, true);
        return;
    }
    // Infrastructure mode: the first hop always goes through the access point.
    Device& ap = devices_.at(nc.hub);
    if (!in_range(from.pos(t_s), ap.pos(t_s), nc.params.range_m)) {
        drop(fi, "out_of_range");
        return;
    }
    plan_hop(net, ap, p, kind, flow, false);
}

void World::plan_hop(std::size_t net, Device& to, const Packet& p,
                     InterfaceKind kind, std::optional<std::size_t> flow,
                     bool final_hop)
{
    NetworkRuntime& n = nets_[net];
    const NetworkConfig& nc = sc_.networks[n.cfg];
    std::size_t fi = flow.value_or(kNoFlow);
    ++n.frames_sent;
    Channel::PlannedHop hop = n.channel.plan(nc.params, queue_.now(),
                                             p.size_bytes, rng_);
    if (hop.lost) {
        ++n.frames_lost;
        drop(fi, "channel_loss");
        return;
    }
    if (fi != kNoFlow)
        ++flows_[fi].in_flight;
    std::string detail = fi != kNoFlow
                             ? "flow " + sc_.flows[fi].id + " payload "
                                   + std::to_string(p.payload_id)
                             : "control payload " + std::to_string(p.payload_id);
    queue_.schedule(hop.arrival, EventKind::PacketArrival, to.id, detail,
                    [this, net, to_id = to.id, p, kind, flow, final_hop] {
                        std::size_t fi = flow.value_or(kNoFlow);
                        if (fi != kNoFlow)
                            --flows_[fi].in_flight;
                        ++nets_[net].frames_delivered;
                        Device& here = devices_.at(to_id);
                        if (queue_.now() <= p.sent_at)
                            violation("causality: arrival at or before send for payload "
                                      + std::to_string(p.payload_id));
                        if (!here.can_receive(kind)) {
                            drop(fi, "rx_down");
                            return;
                        }
                        touch(here, kind);
                        if (!final_hop && p.dst_mac != here.iface(kind).addr.mac) {
                            // Access-point relay at the link layer, no table consult.
                            Device* dst = device_by_mac(net, p.dst_mac, kind);
                            if (!dst) {
                                drop(fi, "no_route");
                                return;
                            }
                            double t_s = us_to_sec(queue_.now().us);
                            if (!in_range(here.pos(t_s), dst->pos(t_s),
                                          sc_.networks[nets_[net].cfg].params.range_m)) {
                                drop(fi, "out_of_range");
                                return;
                            }
                            plan_hop(net, *dst, p, kind, flow, true);
                            return;
                        }
                        deliver_local(here, p, kind, flow);
                    });
}

void World::deliver_local(Device& d, Packet p, InterfaceKind kind,
                          std::optional<std::size_t> flow)
{
    if (p.protocol == Protocol::ARP) {
        d.fs.intercept_arp(p, port_of(kind));
        return;
    }
    if (p.dst_port == kControlPort) {
        dispatch_control(d, p, kind);
        return;
    }
    inject_at_switch(d, p, port_of(kind), flow);
}

void World::deliver_to_app(Device& d, const Packet& p, std::size_t fi)
{
    const FlowConfig& f = sc_.flows[fi];
    FlowRuntime& rt = flows_[fi];
    if (p.src_mac != devices_.at(f.from).virt.mac || p.dst_mac != d.virt.mac
        || !p.src_ip.same_host(devices_.at(f.from).virt.ip)
        || !p.dst_ip.same_host(d.virt.ip))
        violation("flow " + f.id + ": physical address leaked to the application");
    ++rt.delivered;
    rt.delivered_bits += std::uint64_t{8} * p.size_bytes;
    rt.recv_payloads.push_back(p.payload_id);
    rt.jitter.update(p.sent_at, queue_.now());
    if (SessionRuntime* s = session_of(d.id); s && s->peer_of(d.id) == f.from)
        s->meter_of(d.id).add(queue_.now(), std::uint64_t{8} * p.size_bytes);
}

void World::touch(Device& d, InterfaceKind kind)
{
    InterfaceRuntime& i = d.iface(kind);
    i.last_activity = queue_.now();
    if (i.state == InterfaceState::Sleep)
        d.set_state(kind, InterfaceState::Active, queue_.now());
    if (!pending(i.idle_timer)) {
        i.idle_timer = queue_.schedule(
            queue_.now() + sec_to_us(kIdleTimeoutS), EventKind::TimerExpiry,
            d.id, std::string("idle-check ") + kind_name(kind),
            [this, id = d.id, kind] { idle_check(id, kind); });
    }
}

void World::idle_check(const std::string& id, InterfaceKind kind)
{
    Device& d = devices_.at(id);
    InterfaceRuntime& i = d.iface(kind);
    if (i.state != InterfaceState::Active)
        return;
    SimTime due = i.last_activity + sec_to_us(kIdleTimeoutS);
    if (queue_.now() >= due) {
        d.set_state(kind, InterfaceState::Sleep, queue_.now());
        return;
    }
    i.idle_timer = queue_.schedule(due, EventKind::TimerExpiry, id,
                                   std::string("idle-check ") + kind_name(kind),
                                   [this, id, kind] { idle_check(id, kind); });
}

// ----------------------------------------------------------- control plane --

static double rtt_us_of(const Device& d, const std::string& peer,
                        const HandoverConfig& cfg)
{
    const PeerRecord* pr = d.db.find_peer(peer);
    if (pr && pr->rtt_us > 0.0)
        return pr->rtt_us;
    return static_cast<double>(ms_to_us(cfg.initial_rtt_ms));
}

void World::send_control(Device& from, const std::string& to_id,
                         InterfaceKind kind, std::uint32_t size_bytes,
                         ControlPayload payload)
{
    InterfaceRuntime& i = from.iface(kind);
    if (!i.associated || !i.powered() || i.network < 0)
        return;
    const Device& to = devices_.at(to_id);
    Packet p;
    p.src_mac = i.addr.mac;
    p.dst_mac = to.iface(kind).addr.mac;
    p.src_ip = i.addr.ip;
    p.dst_ip = to.iface(kind).addr.ip;
    p.protocol = payload.kind == ControlPayload::Kind::ArpAdvert ? Protocol::ARP
                                                                 : Protocol::UDP;
    p.src_port = kControlPort;
    p.dst_port = kControlPort;
    p.payload_id = ids_.fresh();
    p.size_bytes = size_bytes;
    p.sent_at = queue_.now();
    control_[p.payload_id] = payload;
    touch(from, kind);
    transmit_on_network(static_cast<std::size_t>(i.network), from, to_id, p,
                        kind, std::nullopt);
}

std::optional<InterfaceKind> World::control_path(Device& from,
                                                 const std::string& to_id,
                                                 InterfaceKind preferred)
{
    InterfaceKind order[2] = {preferred,
                              preferred == InterfaceKind::WiFi
                                  ? InterfaceKind::Bluetooth
                                  : InterfaceKind::WiFi};
    double t_s = us_to_sec(queue_.now().us);
    for (InterfaceKind k : order) {
        const InterfaceRuntime& i = from.iface(k);
        if (!i.associated || !i.powered() || i.network < 0)
            continue;
        const NetworkConfig& nc = sc_.networks[nets_[i.network].cfg];
        if (std::find(nc.members.begin(), nc.members.end(), to_id)
            == nc.members.end())
            continue;
        const Device& to = devices_.at(to_id);
        bool direct = !nc.is_bss || from.id == nc.hub || to_id == nc.hub;
        const Device& first_hop = direct ? to : devices_.at(nc.hub);
        if (!in_range(from.pos(t_s), first_hop.pos(t_s), nc.params.range_m))
            continue;
        return k;
    }
    return std::nullopt;
}

void World::start_d2d(std::size_t si)
{
    SessionRuntime& s = sessions_[si];
    Device& a = devices_.at(s.a);
    s.d2d_first_request = queue_.now();
    std::optional<InterfaceKind> kind = control_path(a, s.b, a.active_kind);
    if (kind) {
        ControlPayload pl;
        pl.kind = ControlPayload::Kind::D2dRequest;
        pl.sender = s.a;
        pl.request_sent = s.d2d_first_request;
        send_control(a, s.b, *kind, kControlBytes, pl);
    }
    d2d_retransmit(si);
}

void World::d2d_retransmit(std::size_t si)
{
    SessionRuntime& s = sessions_[si];
    Device& a = devices_.at(s.a);
    std::uint64_t wait = static_cast<std::uint64_t>(
        std::llround(rtt_us_of(a, s.b, sc_.handover)));
    s.d2d_retx = queue_.schedule(
        queue_.now() + wait, EventKind::TimerExpiry, s.a, "d2d-retx " + s.b,
        [this, si] {
            SessionRuntime& s = sessions_[si];
            if (s.d2d_done_a)
                return;
            Device& a = devices_.at(s.a);
            std::optional<InterfaceKind> kind = control_path(a, s.b, a.active_kind);
            if (kind) {
                ControlPayload pl;
                pl.kind = ControlPayload::Kind::D2dRequest;
                pl.sender = s.a;
                pl.request_sent = s.d2d_first_request;
                send_control(a, s.b, *kind, kControlBytes, pl);
            }
            d2d_retransmit(si);
        });
}

void World::fill_peer_records(Device& learner, const Device& about,
                              InterfaceKind path)
{
    PeerRecord& pr = learner.db.peer(about.id);
    pr.peer_id = about.id;
    pr.virt = about.virt;
    pr.wifi.addr = about.wifi.addr;
    pr.wifi.known = true;
    pr.wifi.reachable = about.wifi.powered();
    pr.wifi.last_updated = queue_.now();
    pr.bt.addr = about.bt.addr;
    pr.bt.known = true;
    pr.bt.reachable = about.bt.powered();
    pr.bt.last_updated = queue_.now();
    pr.exchange_done = true;
    pr.path_kind = path;
    pr.via.reset();
    pr.nexthop = about.iface(path).addr;
    for (const FlowConfig& f : sc_.flows) {
        if (pair_key(f.from, f.to) == pair_key(learner.id, about.id))
            learner.db.bind_port(f.dst_port, about.id);
    }
}

void World::dispatch_control(Device& d, const Packet& p, InterfaceKind kind)
{
    auto it = control_.find(p.payload_id);
    if (it == control_.end()) {
        violation(d.id + ": control payload without a registry entry");
        return;
    }
    const ControlPayload pl = it->second;
    switch (pl.kind) {
    case ControlPayload::Kind::D2dRequest: {
        Device& requester = devices_.at(pl.sender);
        fill_peer_records(d, requester, kind);
        if (SessionRuntime* s = session_of(d.id)) {
            (d.id == s->a ? s->d2d_done_a : s->d2d_done_b) = true;
        }
        ControlPayload resp;
        resp.kind = ControlPayload::Kind::D2dResponse;
        resp.sender = d.id;
        resp.request_sent = pl.request_sent;
        send_control(d, pl.sender, kind, kD2dResponseBytes, resp);
        break;
    }
    case ControlPayload::Kind::D2dResponse: {
        SessionRuntime* s = session_of(d.id);
        if (!s)
            break;
        bool& done = d.id == s->a ? s->d2d_done_a : s->d2d_done_b;
        if (done)
            break;
        fill_peer_records(d, devices_.at(pl.sender), kind);
        d.db.note_rtt_sample(pl.sender,
                             static_cast<double>(delta_us(queue_.now(),
                                                          pl.request_sent)));
        done = true;
        queue_.cancel(s->d2d_retx);
        break;
    }
    case ControlPayload::Kind::HandoverRequest:
        on_handover_request(d, pl.sender, pl.dir, pl.epoch);
        break;
    case ControlPayload::Kind::Syn:
        on_syn(d, pl.sender, pl.dir, pl.epoch);
        break;
    case ControlPayload::Kind::ArpAdvert:
        // ARP rides its own protocol; reaching here means a framing bug.
        violation(d.id + ": ARP advert arrived as UDP control");
        break;
    }
}

bool World::on_arp(Device& d, const Packet& p, Port in)
{
    (void)in;
    auto it = control_.find(p.payload_id);
    if (it == control_.end() || it->second.kind != ControlPayload::Kind::ArpAdvert)
        return false;
    const ControlPayload& pl = it->second;
    PeerRecord& pr = d.db.peer(pl.sender);
    pr.peer_id = pl.sender;
    PeerIfaceInfo& info = pr.iface(pl.advert_kind);
    info.addr = devices_.at(pl.sender).iface(pl.advert_kind).addr;
    info.known = true;
    info.reachable = true;
    info.last_updated = queue_.now();
    return true;
}

bool World::on_packet_in(Device& d, const Packet& p, Port in)
{
    if (auto pf = port_flows_.find(p.dst_port); pf != port_flows_.end()) {
        auto key = std::make_tuple(d.id, p.dst_port, d.cm.epoch);
        if (++packet_ins_[key] > 1)
            violation(d.id + ": repeated packet-in for port "
                      + std::to_string(p.dst_port) + " in epoch "
                      + std::to_string(d.cm.epoch));
    }
    if (!d.ctrl.liveness.alive() && sc_.handover.fallback_install_extra_ms > 0.0) {
        auto key = std::make_pair(d.id, p.dst_port);
        if (!pending_fallback_[key]) {
            pending_fallback_[key] = true;
            std::uint64_t extra = ms_to_us(sc_.handover.fallback_install_extra_ms);
            queue_.schedule(queue_.now() + extra, EventKind::ActivityComplete,
                            d.id, "fallback-install port " + std::to_string(p.dst_port),
                            [this, id = d.id, p, in, key] {
                                Device& dev = devices_.at(id);
                                pending_fallback_[key] = false;
                                dev.ctrl.handle_packet_in(dev.db, dev.fs, p, in,
                                                          queue_.now());
                            });
        }
        return false;
    }
    return d.ctrl.handle_packet_in(d.db, d.fs, p, in, queue_.now());
}

// -------------------------------------------------------- handover machine --

bool World::maybe_start_handover(Device& d, HandoverDirection dir,
                                 std::uint64_t epoch_hint)
{
    if (d.cm.phase != HandoverPhase::Idle)
        return false;
    if (d.active_kind != source_kind(dir))
        return false;
    SessionRuntime* s = session_of(d.id);
    if (!s)
        return false;
    const std::string peer = s->peer_of(d.id);
    const PeerRecord* pr = d.db.find_peer(peer);
    if (!pr || !pr->exchange_done)
        return false;

    ConnectionManager& cm = d.cm;
    cm.epoch = std::max(cm.epoch + 1, epoch_hint);
    cm.phase = HandoverPhase::WakingBackup;
    cm.direction = dir;
    cm.peer = peer;
    cm.got_syn = false;
    cm.sent_syn = false;
    cm.replied = false;
    cm.rule_finished = false;
    cm.config_finished = false;
    cm.syn_retx.reset();
    cm.sync_deadline.reset();
    cm.commit_timer.reset();
    cm.current = HandoverRecord{};
    cm.current.direction = dir;
    cm.current.started_at = queue_.now();
    cm.current.epoch = cm.epoch;
    cm.current.device = d.id;

    // Tell the peer on whichever link still works, then once more blindly.
    auto request = [this, id = d.id, peer, dir, epoch = cm.epoch] {
        Device& dev = devices_.at(id);
        if (std::optional<InterfaceKind> k = control_path(dev, peer, dev.active_kind)) {
            ControlPayload pl;
            pl.kind = ControlPayload::Kind::HandoverRequest;
            pl.sender = id;
            pl.dir = dir;
            pl.epoch = epoch;
            send_control(dev, peer, *k, kControlBytes, pl);
        }
    };
    request();
    std::uint64_t rtt = static_cast<std::uint64_t>(
        std::llround(rtt_us_of(d, peer, sc_.handover)));
    queue_.schedule(queue_.now() + rtt, EventKind::TimerExpiry, d.id,
                    "handover-request-retx",
                    [this, id = d.id, epoch = cm.epoch, request] {
                        Device& dev = devices_.at(id);
                        if (dev.cm.epoch != epoch)
                            return;
                        if (dev.cm.phase == HandoverPhase::WakingBackup
                            || dev.cm.phase == HandoverPhase::Associating
                            || dev.cm.phase == HandoverPhase::Synchronizing)
                            request();
                    });

    InterfaceKind backup = target_kind(dir);
    InterfaceRuntime& b = d.iface(backup);
    if (b.powered()) {
        on_backup_awake(d, cm.epoch);
    } else {
        d.set_state(backup, InterfaceState::WakingUp, queue_.now());
        EnergyParams ep = EnergyParams::defaults();
        std::uint64_t wake = sec_to_us(ep.of(backup).wakeup_duration_s);
        queue_.schedule(queue_.now() + wake, EventKind::InterfaceReady, d.id,
                        kind_name(backup),
                        [this, id = d.id, epoch = cm.epoch] {
                            on_backup_awake(devices_.at(id), epoch);
                        });
    }
    return true;
}

void World::on_backup_awake(Device& d, std::uint64_t epoch)
{
    if (d.cm.phase != HandoverPhase::WakingBackup || d.cm.epoch != epoch)
        return;
    InterfaceKind backup = target_kind(d.cm.direction);
    if (d.iface(backup).state == InterfaceState::WakingUp)
        d.set_state(backup, InterfaceState::Sleep, queue_.now());
    d.cm.phase = HandoverPhase::Associating;

    int net = -1;
    for (std::size_t ni = 0; ni < sc_.networks.size(); ++ni) {
        const NetworkConfig& n = sc_.networks[ni];
        InterfaceKind k = n.is_bss ? InterfaceKind::WiFi : InterfaceKind::Bluetooth;
        if (k == backup
            && std::find(n.members.begin(), n.members.end(), d.id) != n.members.end()) {
            net = static_cast<int>(ni);
            break;
        }
    }
    if (net < 0) {
        abort_handover(d, "no_network");
        return;
    }
    const NetworkConfig& nc = sc_.networks[net];
    double t_s = us_to_sec(queue_.now().us);
    const Device& hub = devices_.at(nc.hub);
    if (!hub.iface(backup).powered() && nc.hub != d.id) {
        abort_handover(d, "hub_down");
        return;
    }
    if (!in_range(d.pos(t_s), hub.pos(t_s), nc.params.range_m)) {
        abort_handover(d, "out_of_range");
        return;
    }
    InterfaceRuntime& b = d.iface(backup);
    b.associated = true;
    b.configured = false;
    b.network = net;
    enter_synchronizing(d);
}

void World::enter_synchronizing(Device& d)
{
    d.cm.phase = HandoverPhase::Synchronizing;
    SimTime started = d.cm.current.started_at;
    d.cm.sync_deadline = queue_.schedule(
        queue_.now() + sec_to_us(sc_.handover.sync_timeout_s),
        EventKind::TimerExpiry, d.id, "sync-deadline",
        [this, id = d.id, started] {
            Device& dev = devices_.at(id);
            if (dev.cm.phase == HandoverPhase::Synchronizing
                && dev.cm.current.started_at == started)
                abort_handover(dev, "sync_timeout");
        });
    send_syn(d);
    check_commit(d);
}

void World::send_syn(Device& d)
{
    std::optional<InterfaceKind> kind = control_path(d, d.cm.peer, d.active_kind);
    if (kind) {
        ControlPayload pl;
        pl.kind = ControlPayload::Kind::Syn;
        pl.sender = d.id;
        pl.dir = d.cm.direction;
        pl.epoch = d.cm.epoch;
        send_control(d, d.cm.peer, *kind, kControlBytes, pl);
        d.cm.sent_syn = true;
        d.cm.last_syn_send = queue_.now();
    }
    std::uint64_t half_rtt = static_cast<std::uint64_t>(
        std::llround(rtt_us_of(d, d.cm.peer, sc_.handover) / 2.0));
    queue_.cancel(d.cm.syn_retx);
    SimTime started = d.cm.current.started_at;
    d.cm.syn_retx = queue_.schedule(
        queue_.now() + half_rtt, EventKind::TimerExpiry, d.id, "syn-retx",
        [this, id = d.id, started] {
            Device& dev = devices_.at(id);
            if (dev.cm.phase == HandoverPhase::Synchronizing
                && dev.cm.current.started_at == started)
                send_syn(dev);
        });
}

void World::on_syn(Device& d, const std::string& from, HandoverDirection dir,
                   std::uint64_t epoch)
{
    ConnectionManager& cm = d.cm;
    bool active_attempt = cm.phase == HandoverPhase::WakingBackup
                          || cm.phase == HandoverPhase::Associating
                          || cm.phase == HandoverPhase::Synchronizing
                          || cm.phase == HandoverPhase::Committing;
    if (!active_attempt) {
        if (epoch > cm.epoch) {
            // We missed the request; the SYN itself announces the handover.
            on_handover_request(d, from, dir, epoch);
            if (d.cm.phase == HandoverPhase::Idle)
                return;
            d.cm.got_syn = true;
        }
        return;
    }
    if (epoch < cm.epoch)
        return; // stale
    if (epoch > cm.epoch) {
        cm.epoch = epoch;
        cm.current.epoch = epoch;
    }
    cm.got_syn = true;
    if (cm.phase == HandoverPhase::Synchronizing) {
        if (!cm.replied) {
            cm.replied = true;
            send_syn(d);
        }
        check_commit(d);
    }
}

void World::on_handover_request(Device& d, const std::string& from,
                                HandoverDirection dir, std::uint64_t epoch)
{
    (void)from;
    if (d.cm.phase == HandoverPhase::Idle) {
        maybe_start_handover(d, dir, epoch);
        return;
    }
    if (d.cm.direction == dir && epoch > d.cm.epoch) {
        d.cm.epoch = epoch;
        d.cm.current.epoch = epoch;
    }
}

void World::check_commit(Device& d)
{
    ConnectionManager& cm = d.cm;
    if (cm.phase != HandoverPhase::Synchronizing || !cm.got_syn || !cm.sent_syn)
        return;
    if (pending(cm.commit_timer))
        return;
    std::uint64_t half_rtt = static_cast<std::uint64_t>(
        std::llround(rtt_us_of(d, cm.peer, sc_.handover) / 2.0));
    SimTime at = std::max(queue_.now(), cm.last_syn_send + half_rtt);
    SimTime started = cm.current.started_at;
    cm.commit_timer = queue_.schedule(
        at, EventKind::TimerExpiry, d.id, "sync-commit",
        [this, id = d.id, started] {
            Device& dev = devices_.at(id);
            if (dev.cm.phase == HandoverPhase::Synchronizing
                && dev.cm.current.started_at == started)
                start_commit(dev);
        });
}

void World::start_commit(Device& d)
{
    ConnectionManager& cm = d.cm;
    cm.phase = HandoverPhase::Committing;
    queue_.cancel(cm.syn_retx);
    queue_.cancel(cm.sync_deadline);
    ActivityDurations dur = sample_durations(sc_.handover, cm.direction, rng_);
    cm.current.t_config_ms = dur.config_ms;
    cm.current.t_rule_install_ms = dur.rule_install_ms;
    cm.current.delay_ms = std::max(dur.config_ms, dur.rule_install_ms);
    cm.rule_done = queue_.now() + ms_to_us(dur.rule_install_ms);
    cm.config_done = queue_.now() + ms_to_us(dur.config_ms);
    std::uint64_t epoch = cm.epoch;
    queue_.schedule(cm.rule_done, EventKind::ActivityComplete, d.id,
                    "rule-install",
                    [this, id = d.id, epoch] {
                        on_rule_installed(devices_.at(id), epoch);
                    });
    queue_.schedule(cm.config_done, EventKind::ActivityComplete, d.id, "config",
                    [this, id = d.id, epoch] {
                        on_config_done(devices_.at(id), epoch);
                    });
}

void World::flip_path(Device& d)
{
    InterfaceKind target = target_kind(d.cm.direction);
    PeerRecord& pr = d.db.peer(d.cm.peer);
    pr.path_kind = target;
    pr.via.reset();
    pr.nexthop = pr.iface(target).addr;
}

void World::on_rule_installed(Device& d, std::uint64_t epoch)
{
    if (d.cm.phase != HandoverPhase::Committing || d.cm.epoch != epoch)
        return;
    flip_path(d);
    if (SessionRuntime* s = session_of(d.id)) {
        for (std::size_t fi : s->flow_idx)
            d.ctrl.reinstall_port_rules(d.db, d.fs, d.cm.peer,
                                        sc_.flows[fi].dst_port, queue_.now());
    }
    d.cm.rule_finished = true;
    d.cm.rule_done = queue_.now();
    if (d.cm.config_finished)
        finish_commit(d);
}

void World::on_config_done(Device& d, std::uint64_t epoch)
{
    if (d.cm.phase != HandoverPhase::Committing || d.cm.epoch != epoch)
        return;
    d.iface(target_kind(d.cm.direction)).configured = true;
    d.cm.config_finished = true;
    d.cm.config_done = queue_.now();
    if (d.cm.rule_finished)
        finish_commit(d);
}

void World::finish_commit(Device& d)
{
    ConnectionManager& cm = d.cm;
    cm.current.committed_at = queue_.now();
    d.handovers.push_back(cm.current);

    InterfaceKind old = source_kind(cm.direction);
    InterfaceRuntime& o = d.iface(old);
    queue_.cancel(o.idle_timer);
    if (o.state != InterfaceState::Off)
        d.set_state(old, InterfaceState::Off, queue_.now());
    o.associated = false;
    o.configured = false;
    o.network = -1;
    // The old path's ingress rules were kept alive for stragglers; they die
    // with the interface.
    d.fs.table().remove_where([old_port = port_of(old)](const FlowRule& r) {
        return r.match.in_port && *r.match.in_port == old_port;
    });

    d.active_kind = target_kind(cm.direction);
    cm.phase = HandoverPhase::Idle;
    cancel_handover_timers(d);

    send_gratuitous_arp(d);
    std::uint64_t rtt = static_cast<std::uint64_t>(
        std::llround(rtt_us_of(d, cm.peer, sc_.handover)));
    queue_.schedule(queue_.now() + rtt, EventKind::TimerExpiry, d.id, "arp-retx",
                    [this, id = d.id] { send_gratuitous_arp(devices_.at(id)); });
}

void World::abort_handover(Device& d, const std::string& reason)
{
    ConnectionManager& cm = d.cm;
    InterfaceKind backup = target_kind(cm.direction);
    InterfaceRuntime& b = d.iface(backup);
    queue_.cancel(b.idle_timer);
    if (b.state != InterfaceState::Off)
        d.set_state(backup, InterfaceState::Off, queue_.now());
    b.associated = false;
    b.configured = false;
    b.network = -1;
    cm.current.committed_at.reset();
    d.handovers.push_back(cm.current);
    cm.phase = HandoverPhase::Idle;
    cancel_handover_timers(d);
    (void)reason; // aborts are legitimate outcomes, not violations
}

void World::cancel_handover_timers(Device& d)
{
    queue_.cancel(d.cm.syn_retx);
    queue_.cancel(d.cm.sync_deadline);
    queue_.cancel(d.cm.commit_timer);
    d.cm.syn_retx.reset();
    d.cm.sync_deadline.reset();
    d.cm.commit_timer.reset();
}

void World::send_gratuitous_arp(Device& d)
{
    if (d.cm.peer.empty())
        return;
    InterfaceKind kind = d.active_kind;
    if (!control_path(d, d.cm.peer, kind))
        return;
    ControlPayload pl;
    pl.kind = ControlPayload::Kind::ArpAdvert;
    pl.sender = d.id;
    pl.advert_kind = kind;
    send_control(d, d.cm.peer, kind, kControlBytes, pl);
}

// ------------------------------------------------------------ supervision --

void World::supervision_tick(std::uint64_t k)
{
    double t_s = sc_.trigger.evaluation_period_s * static_cast<double>(k);
    for (SessionRuntime& s : sessions_) {
        Device& da = devices_.at(s.a);
        Device& db = devices_.at(s.b);
        bool btm = bt_mutual_range(s, t_s);
        bool wfm = wifi_mutual_range(s, t_s);
        std::uint64_t hint = std::max(da.cm.epoch, db.cm.epoch) + 1;

        if (sc_.trigger_enabled) {
            for (Device* dp : {&da, &db}) {
                Device& d = *dp;
                if (d.cm.phase != HandoverPhase::Idle)
                    continue;
                const PeerRecord* pr = d.db.find_peer(s.peer_of(d.id));
                if (!pr || !pr->exchange_done)
                    continue;
                ThroughputMeter& m = s.meter_of(d.id);
                std::size_t done = m.completed_windows(queue_.now());
                std::vector<double> history(done);
                for (std::size_t w = 0; w < done; ++w)
                    history[w] = m.kbps(w);
                TriggerDecision dec = evaluate_trigger(sc_.trigger, history,
                                                       d.active_kind, btm);
                if (dec == TriggerDecision::SwitchToBluetooth)
                    maybe_start_handover(d, HandoverDirection::WiFiToBluetooth,
                                         hint);
                else if (dec == TriggerDecision::SwitchToWiFi)
                    maybe_start_handover(d, HandoverDirection::BluetoothToWiFi,
                                         hint);
            }
        }

        // Range supervision: a session whose shared link left mutual range
        // moves to the other technology from both ends at once.
        bool both_idle = da.cm.phase == HandoverPhase::Idle
                         && db.cm.phase == HandoverPhase::Idle;
        if (!both_idle)
            continue;
        if (da.active_kind == InterfaceKind::Bluetooth
            && db.active_kind == InterfaceKind::Bluetooth && !btm
            && sc_.common_network(s.a, s.b, true)) {
            maybe_start_handover(da, HandoverDirection::BluetoothToWiFi, hint);
            maybe_start_handover(db, HandoverDirection::BluetoothToWiFi, hint);
        } else if (da.active_kind == InterfaceKind::WiFi
                   && db.active_kind == InterfaceKind::WiFi && !wfm && btm) {
            maybe_start_handover(da, HandoverDirection::WiFiToBluetooth, hint);
            maybe_start_handover(db, HandoverDirection::WiFiToBluetooth, hint);
        }
    }
}

bool World::hub_path_ok(const NetworkConfig& n, const std::string& x,
                        const std::string& y, double t_s) const
{
    const Device& hub = devices_.at(n.hub);
    const Device& dx = devices_.at(x);
    const Device& dy = devices_.at(y);
    return in_range(dx.pos(t_s), hub.pos(t_s), n.params.range_m)
           && in_range(dy.pos(t_s), hub.pos(t_s), n.params.range_m);
}

bool World::bt_mutual_range(const SessionRuntime& s, double t_s) const
{
    const NetworkConfig* n = sc_.common_network(s.a, s.b, false);
    return n && hub_path_ok(*n, s.a, s.b, t_s);
}

bool World::wifi_mutual_range(const SessionRuntime& s, double t_s) const
{
    const NetworkConfig* n = sc_.common_network(s.a, s.b, true);
    return n && hub_path_ok(*n, s.a, s.b, t_s);
}

// ---------------------------------------------------------------- lookups --

SessionRuntime* World::session_of(const std::string& device_id)
{
    for (SessionRuntime& s : sessions_) {
        if (s.a == device_id || s.b == device_id)
            return &s;
    }
    return nullptr;
}

std::size_t World::flow_by_port(std::uint16_t port) const
{
    auto it = port_flows_.find(port);
    return it == port_flows_.end() ? kNoFlow : it->second;
}

Device* World::device_by_mac(std::size_t net, const MacAddress& mac,
                             InterfaceKind kind)
{
    for (const std::string& m : sc_.networks[nets_[net].cfg].members) {
        Device& d = devices_.at(m);
        if (d.iface(kind).addr.mac == mac)
            return &d;
    }
    return nullptr;
}

void World::violation(const std::string& what)
{
    violations_.push_back(what);
}

std::vector<HandoverRecord> World::handover_records() const
{
    std::vector<HandoverRecord> out;
    for (const auto& [id, d] : devices_)
        out.insert(out.end(), d.handovers.begin(), d.handovers.end());
    std::sort(out.begin(), out.end(),
              [](const HandoverRecord& x, const HandoverRecord& y) {
                  if (x.started_at != y.started_at)
                      return x.started_at < y.started_at;
                  return x.device < y.device;
              });
    return out;
}

void World::finalize()
{
    for (auto& [id, d] : devices_) {
        const DeviceConfig* dc = sc_.find_device(id);
        ledgers_[id] = ledger_from_trace(dc->wifi_initial, dc->bt_initial,
                                         d.state_log, SimTime{0}, horizon_);
    }
    for (const FlowRuntime& rt : flows_) {
        std::uint64_t accounted = rt.delivered + rt.dropped() + rt.in_flight;
        if (accounted != rt.sent)
            violation("flow " + sc_.flows[rt.cfg].id + ": conservation broke, sent "
                      + std::to_string(rt.sent) + " accounted "
                      + std::to_string(accounted));
    }
}

} // namespace vhsim
