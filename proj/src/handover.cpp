#include "vhsim/handover.hpp"

namespace vhsim {

const char* direction_name(HandoverDirection d)
{
    return d == HandoverDirection::WiFiToBluetooth ? "wifi_to_bluetooth"
                                                   : "bluetooth_to_wifi";
}

const char* phase_name(HandoverPhase p)
{
    switch (p) {
    case HandoverPhase::Idle:          return "idle";
    case HandoverPhase::WakingBackup:  return "waking-backup";
    case HandoverPhase::Associating:   return "associating";
    case HandoverPhase::Synchronizing: return "synchronizing";
    case HandoverPhase::Committing:    return "committing";
    case HandoverPhase::Done:          return "done";
    case HandoverPhase::Aborted:       return "aborted";
    }
    return "unknown";
}

ActivityDurations sample_durations(const HandoverConfig& cfg,
                                   HandoverDirection d, SimRng& rng)
{
    ActivityDurations out{};
    out.config_ms = cfg.config_dist(d).sample(rng);
    const Distribution& rule = cfg.rule_dist(d);
    if (rule.kind == Distribution::Kind::ConfigRatio)
        out.rule_install_ms = out.config_ms * rule.a;
    else
        out.rule_install_ms = rule.sample(rng);
    return out;
}

std::uint64_t handover_loss(SimTime rule_done, SimTime config_done,
                            const std::vector<SimTime>& send_schedule)
{
    if (config_done <= rule_done)
        return 0;
    std::uint64_t lost = 0;
    for (SimTime t : send_schedule) {
        if (rule_done <= t && t < config_done)
            ++lost;
    }
    return lost;
}

} // namespace vhsim
