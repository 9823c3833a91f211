#include "vhsim/runner.hpp"

#include "vhsim/world.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace vhsim {

namespace {

std::string fmt(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string traffic_csv(const World& w)
{
    std::string out = "flow,sent,received,loss_rate,avg_jitter_ms,max_jitter_ms,"
                      "mean_kbps\n";
    for (const FlowRuntime& rt : w.flows()) {
        const FlowConfig& f = w.scenario().flows[rt.cfg];
        double span_s = f.stop_s - f.start_s;
        double mean_kbps = span_s > 0.0
                               ? static_cast<double>(rt.delivered_bits) / 1000.0
                                     / span_s
                               : 0.0;
        LossStats loss{rt.sent, rt.delivered};
        out += f.id;
        out += ',' + std::to_string(rt.sent);
        out += ',' + std::to_string(rt.delivered);
        out += ',' + fmt(loss.loss_rate(), 6);
        out += ',' + fmt(rt.jitter.jitter_us() / 1000.0, 3);
        out += ',' + fmt(rt.jitter.max_jitter_us() / 1000.0, 3);
        out += ',' + fmt(mean_kbps, 3);
        out += '\n';
    }
    return out;
}

std::string handovers_csv(const World& w)
{
    std::string out = "direction,started_at,committed_at,t_config_ms,"
                      "t_rule_install_ms,delay_ms,lost_packets\n";
    for (const HandoverRecord& h : w.handover_records()) {
        out += direction_name(h.direction);
        out += ',' + std::to_string(h.started_at.us);
        out += ',';
        out += h.committed_at ? std::to_string(h.committed_at->us) : "aborted";
        out += ',' + fmt(h.t_config_ms, 3);
        out += ',' + fmt(h.t_rule_install_ms, 3);
        out += ',' + fmt(h.delay_ms, 3);
        out += ',' + std::to_string(h.lost_packets);
        out += '\n';
    }
    return out;
}

std::string energy_csv(const World& w)
{
    EnergyParams ep = EnergyParams::defaults();
    std::string out = "interface,state,from_us,to_us,power_mw,energy_mj\n";
    double duration_s = w.scenario().duration_s;
    for (const auto& [id, ledger] : w.ledgers()) {
        for (const StateInterval& iv : ledger.intervals) {
            double p = power_mw(ep, iv.kind, iv.state);
            double e = p * us_to_sec(iv.to.us - iv.from.us);
            out += id;
            out += ':';
            out += kind_name(iv.kind);
            out += ',';
            out += state_name(iv.state);
            out += ',' + std::to_string(iv.from.us);
            out += ',' + std::to_string(iv.to.us);
            out += ',' + fmt(p, 2);
            out += ',' + fmt(e, 6);
            out += '\n';
        }
    }
    for (const auto& [id, ledger] : w.ledgers()) {
        for (InterfaceKind k : {InterfaceKind::WiFi, InterfaceKind::Bluetooth}) {
            double e = ledger.total_mj(ep, k);
            out += id;
            out += ':';
            out += kind_name(k);
            out += ",total,0," + std::to_string(sec_to_us(duration_s));
            out += ',' + fmt(duration_s > 0 ? e / duration_s : 0.0, 2);
            out += ',' + fmt(e, 6);
            out += '\n';
        }
    }
    return out;
}

std::string summary_txt(const World& w)
{
    EnergyParams ep = EnergyParams::defaults();
    std::string out;
    out += "seed = " + std::to_string(w.seed()) + "\n";
    out += "duration_s = " + fmt(w.scenario().duration_s, 3) + "\n";
    out += "\nflows\n";
    for (const FlowRuntime& rt : w.flows()) {
        const FlowConfig& f = w.scenario().flows[rt.cfg];
        LossStats loss{rt.sent, rt.delivered};
        out += "  " + f.id + ": sent=" + std::to_string(rt.sent)
               + " received=" + std::to_string(rt.delivered)
               + " loss_rate=" + fmt(loss.loss_rate(), 6)
               + " avg_jitter_ms=" + fmt(rt.jitter.jitter_us() / 1000.0, 3);
        if (rt.dropped() > 0) {
            out += " drops[";
            bool first = true;
            for (const auto& [reason, n] : rt.drops) {
                if (!first)
                    out += ' ';
                first = false;
                out += reason + "=" + std::to_string(n);
            }
            out += "]";
        }
        if (rt.in_flight > 0)
            out += " in_flight=" + std::to_string(rt.in_flight);
        out += "\n";
    }
    out += "\nhandovers\n";
    for (const HandoverRecord& h : w.handover_records()) {
        out += "  " + h.device + " " + std::string(direction_name(h.direction))
               + " started_us=" + std::to_string(h.started_at.us);
        if (h.committed_at)
            out += " committed_us=" + std::to_string(h.committed_at->us)
                   + " delay_ms=" + fmt(h.delay_ms, 3) + " lost="
                   + std::to_string(h.lost_packets);
        else
            out += " aborted";
        out += "\n";
    }
    out += "\nenergy_mj\n";
    for (const auto& [id, ledger] : w.ledgers()) {
        out += "  " + id + ": wifi=" + fmt(ledger.total_mj(ep, InterfaceKind::WiFi), 3)
               + " bluetooth=" + fmt(ledger.total_mj(ep, InterfaceKind::Bluetooth), 3)
               + " total=" + fmt(ledger.total_mj(ep), 3) + "\n";
    }
    out += "\nviolations = " + std::to_string(w.violations().size()) + "\n";
    for (const std::string& v : w.violations())
        out += "  " + v + "\n";
    return out;
}

} // namespace

ScenarioReport run_scenario(const Scenario& sc,
                            std::optional<std::uint64_t> seed_override,
                            bool with_trace)
{
    TraceLog trace;
    World w(sc, seed_override);
    if (with_trace)
        w.set_trace(&trace);
    w.run();

    ScenarioReport r;
    r.seed = w.seed();
    r.traffic_csv = traffic_csv(w);
    r.handovers_csv = handovers_csv(w);
    r.energy_csv = energy_csv(w);
    r.summary_txt = summary_txt(w);
    if (with_trace)
        r.trace = trace.text();
    r.violations = w.violations();
    return r;
}

bool write_report(const ScenarioReport& r, const std::string& dir,
                  std::string* err)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        if (err)
            *err = "cannot create " + dir + ": " + ec.message();
        return false;
    }
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream f(dir + "/" + name, std::ios::binary);
        f << body;
        return f.good();
    };
    bool ok = put("summary.txt", r.summary_txt) && put("traffic.csv", r.traffic_csv)
              && put("handovers.csv", r.handovers_csv)
              && put("energy.csv", r.energy_csv);
    if (ok && !r.trace.empty())
        ok = put("trace.tsv", r.trace);
    if (!ok && err)
        *err = "write failure under " + dir;
    return ok;
}

} // namespace vhsim
