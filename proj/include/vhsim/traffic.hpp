#ifndef VHSIM_TRAFFIC_HPP
#define VHSIM_TRAFFIC_HPP

#include <cstdint>
#include <vector>

#include "vhsim/rng.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

// Constant-bit-rate UDP source, Iperf style.
struct CbrConfig {
    double rate_kbps = 0.0;
    std::uint32_t packet_size_bytes = 0;
    SimTime start;
    SimTime stop;
};

// Exact emission spacing in microseconds, rounded to nearest.
std::uint64_t cbr_interval_us(const CbrConfig& cfg);

// Emission instants start + k*interval for k = 0,1,... while strictly
// before stop. Throws std::invalid_argument on nonpositive rate or size.
std::vector<SimTime> cbr_schedule(const CbrConfig& cfg);

// Conversational speech source: exponential talkspurts at a fixed on-rate
// separated by silent gaps. A gap is the peer's pause plus the shared
// mutual-silence stretch, so gap = exp(pause) + exp(mutual).
struct SpeechModelConfig {
    double mean_talkspurt_s = 1.004;
    double mean_pause_s = 1.587;
    double mean_mutual_silence_s = 0.508;
    double on_rate_kbps = 0.0;
};

enum class SpeechPhase { Talkspurt, Silence };

struct SpeechStep {
    SpeechPhase phase;
    double duration_s;
};

// Strict alternation: the phase after Talkspurt is Silence and vice versa.
SpeechStep speech_next_phase(const SpeechModelConfig& cfg, SimRng& rng,
                             SpeechPhase current);

} // namespace vhsim

#endif
