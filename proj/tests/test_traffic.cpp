#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "vhsim/metrics.hpp"
#include "vhsim/rng.hpp"
#include "vhsim/traffic.hpp"

using namespace vhsim;

TEST_CASE("cbr interval is exact") {
    CbrConfig c;
    c.packet_size_bytes = 500;
    c.rate_kbps = 200.0;
    CHECK(cbr_interval_us(c) == 20000); // 4000 bits at 200 kbps
    c.rate_kbps = 300.0;
    CHECK(cbr_interval_us(c) == 13333); // rounded to nearest
    c.packet_size_bytes = 50;
    c.rate_kbps = 4.0;
    CHECK(cbr_interval_us(c) == 100000);
}

TEST_CASE("cbr schedule covers [start, stop) at the exact spacing") {
    CbrConfig c;
    c.packet_size_bytes = 500;
    c.rate_kbps = 200.0;
    c.start = SimTime{500000};
    c.stop = SimTime{700000};
    std::vector<SimTime> sched = cbr_schedule(c);
    REQUIRE(sched.size() == 10); // 200 ms window / 20 ms spacing
    for (std::size_t k = 0; k < sched.size(); ++k)
        CHECK(sched[k].us == 500000 + k * 20000);
    CHECK(sched.back().us < c.stop.us);

    c.rate_kbps = 0.0;
    CHECK_THROWS_AS(cbr_schedule(c), std::invalid_argument);
}

TEST_CASE("speech phases alternate strictly") {
    SpeechModelConfig cfg;
    SimRng r(17);
    SpeechPhase phase = SpeechPhase::Silence;
    for (int i = 0; i < 200; ++i) {
        SpeechStep step = speech_next_phase(cfg, r, phase);
        CHECK(step.phase != phase);
        CHECK(step.duration_s > 0.0);
        phase = step.phase;
    }
}

TEST_CASE("speech durations converge to the configured means") {
    // Talkspurts are one draw; each silence is a pause draw plus the shared
    // mutual-silence draw, so its mean is the sum of the two.
    SpeechModelConfig cfg;
    SimRng r(7);
    const int cycles = 500000;
    double talk = 0.0, silence = 0.0;
    SpeechPhase phase = SpeechPhase::Silence;
    for (int i = 0; i < cycles; ++i) {
        SpeechStep t = speech_next_phase(cfg, r, phase); // -> Talkspurt
        REQUIRE(t.phase == SpeechPhase::Talkspurt);
        talk += t.duration_s;
        SpeechStep s = speech_next_phase(cfg, r, t.phase); // -> Silence
        REQUIRE(s.phase == SpeechPhase::Silence);
        silence += s.duration_s;
    }
    CHECK(talk / cycles == doctest::Approx(1.004).epsilon(0.01));
    CHECK(silence / cycles == doctest::Approx(1.587 + 0.508).epsilon(0.01));
}

TEST_CASE("jitter estimator matches the worked example") {
    // sends at 0/20/40 ms, receipts at 5/25/55 ms: transits 5,5,15.
    // First packet seeds only; |D2|=0 keeps J=0; |D3|=10 gives J=10/16.
    JitterEstimator j;
    j.update(SimTime{0}, SimTime{5000});
    CHECK(j.jitter_us() == 0.0);
    j.update(SimTime{20000}, SimTime{25000});
    CHECK(j.jitter_us() == 0.0);
    j.update(SimTime{40000}, SimTime{55000});
    CHECK(j.jitter_us() == doctest::Approx(625.0));
    CHECK(j.max_jitter_us() == doctest::Approx(625.0));
    CHECK(j.samples() == 3);
}

TEST_CASE("jitter estimator equals the independent recurrence on random traces") {
    SimRng r(23);
    for (int trial = 0; trial < 20; ++trial) {
        JitterEstimator est;
        double oracle = 0.0;
        double oracle_max = 0.0;
        bool have_prev = false;
        std::int64_t prev_transit = 0;
        std::uint64_t send = 0, recv = 0;
        for (int i = 0; i < 500; ++i) {
            send += 1000 + r.integer(20000);
            recv = send + 1000 + r.integer(30000);
            est.update(SimTime{send}, SimTime{recv});
            std::int64_t transit = static_cast<std::int64_t>(recv - send);
            if (have_prev) {
                double d = std::abs(static_cast<double>(transit - prev_transit));
                oracle += (d - oracle) / 16.0;
                if (oracle > oracle_max)
                    oracle_max = oracle;
            }
            prev_transit = transit;
            have_prev = true;
        }
        CHECK(est.jitter_us() == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(est.max_jitter_us() == doctest::Approx(oracle_max).epsilon(1e-12));
    }
}

TEST_CASE("throughput meter buckets whole seconds") {
    ThroughputMeter m;
    m.add(SimTime{100000}, 2000);
    m.add(SimTime{999999}, 3000);
    m.add(SimTime{1000000}, 7000); // lands in window 1
    CHECK(m.kbps(0) == doctest::Approx(5.0));
    CHECK(m.kbps(1) == doctest::Approx(7.0));
    CHECK(m.kbps(5) == 0.0);
    CHECK(m.completed_windows(SimTime{1000000}) == 1);
    CHECK(m.completed_windows(SimTime{2500000}) == 2);
    CHECK(m.completed_windows(SimTime{0}) == 0);
}

TEST_CASE("no traffic threshold is strict") {
    CHECK(is_no_traffic(4.999));
    CHECK_FALSE(is_no_traffic(5.0)); // exactly 5 kbps still counts as traffic
    CHECK_FALSE(is_no_traffic(5.001));
}

TEST_CASE("loss stats") {
    LossStats ls;
    CHECK(ls.loss_rate() == 0.0);
    ls.sent = 200;
    ls.received = 150;
    CHECK(ls.loss_rate() == doctest::Approx(0.25));
}
