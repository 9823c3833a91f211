#include "vhsim/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace vhsim {

std::uint64_t cbr_interval_us(const CbrConfig& cfg)
{
    if (cfg.rate_kbps <= 0.0)
        throw std::invalid_argument("cbr: nonpositive rate");
    if (cfg.packet_size_bytes == 0)
        throw std::invalid_argument("cbr: zero packet size");
    // bits / (kbit/s) = ms; scale to us before rounding.
    double us = static_cast<double>(cfg.packet_size_bytes) * 8.0 * 1000.0
                / cfg.rate_kbps;
    return static_cast<std::uint64_t>(std::llround(us));
}

std::vector<SimTime> cbr_schedule(const CbrConfig& cfg)
{
    std::uint64_t step = cbr_interval_us(cfg);
    std::vector<SimTime> times;
    if (step == 0)
        throw std::invalid_argument("cbr: interval rounds to zero");
    for (SimTime t = cfg.start; t < cfg.stop; t = t + step)
        times.push_back(t);
    return times;
}

SpeechStep speech_next_phase(const SpeechModelConfig& cfg, SimRng& rng,
                             SpeechPhase current)
{
    if (current == SpeechPhase::Talkspurt) {
        double gap = rng.exponential(cfg.mean_pause_s)
                     + rng.exponential(cfg.mean_mutual_silence_s);
        return {SpeechPhase::Silence, gap};
    }
    return {SpeechPhase::Talkspurt, rng.exponential(cfg.mean_talkspurt_s)};
}

} // namespace vhsim
