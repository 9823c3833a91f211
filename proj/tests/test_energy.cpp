#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "vhsim/energy.hpp"

using namespace vhsim;

namespace {
const EnergyParams& P() {
    static EnergyParams p = EnergyParams::defaults();
    return p;
}
} // namespace

TEST_CASE("default power table") {
    const EnergyParams& p = P();
    CHECK(p.wifi.wakeup_energy_mj == 536.77);
    CHECK(p.wifi.wakeup_duration_s == doctest::Approx(1.4));
    CHECK(p.wifi.sleep_mw == 495.05);
    CHECK(p.wifi.active_mw == 660.09);
    CHECK(p.wifi.off_mw == 213.75);
    CHECK(p.bluetooth.wakeup_energy_mj == 417.98);
    CHECK(p.bluetooth.wakeup_duration_s == doctest::Approx(3.03));
    CHECK(p.bluetooth.sleep_mw == 79.24);
    CHECK(p.bluetooth.active_mw == 104.21);
    CHECK(p.bluetooth.off_mw == 38.20);
}

TEST_CASE("waking up draws the averaged wakeup power") {
    CHECK(power_mw(P(), InterfaceKind::Bluetooth, InterfaceState::WakingUp) ==
          doctest::Approx(137.95).epsilon(0.0001));
    CHECK(power_mw(P(), InterfaceKind::WiFi, InterfaceState::WakingUp) ==
          doctest::Approx(383.41).epsilon(0.0001));
    CHECK(power_mw(P(), InterfaceKind::WiFi, InterfaceState::Active) == 660.09);
    CHECK(power_mw(P(), InterfaceKind::Bluetooth, InterfaceState::Off) == 38.20);
}

TEST_CASE("interval energy is a plain power times duration sum") {
    // By hand: wifi sleep 2 s = 990.10 mJ, bt active 0.5 s = 52.105 mJ.
    std::vector<StateInterval> iv = {
        {InterfaceKind::WiFi, InterfaceState::Sleep, SimTime{0}, SimTime{2000000}},
        {InterfaceKind::Bluetooth, InterfaceState::Active, SimTime{0}, SimTime{500000}},
    };
    CHECK(interval_energy_mj(P(), iv) == doctest::Approx(990.10 + 52.105));

    std::vector<StateInterval> backwards = {
        {InterfaceKind::WiFi, InterfaceState::Sleep, SimTime{10}, SimTime{5}}};
    CHECK_THROWS_AS(interval_energy_mj(P(), backwards), std::invalid_argument);

    std::vector<StateInterval> overlap = {
        {InterfaceKind::WiFi, InterfaceState::Sleep, SimTime{0}, SimTime{10}},
        {InterfaceKind::WiFi, InterfaceState::Active, SimTime{5}, SimTime{15}},
    };
    CHECK_THROWS_AS(interval_energy_mj(P(), overlap), std::invalid_argument);
}

TEST_CASE("ledger from a hand built transition trace") {
    // wifi: sleep for 1 s, active for 1 s, then off for 1 s
    // bt:   off for 2 s, waking for 1 s
    std::vector<StateChange> changes = {
        {SimTime{1000000}, InterfaceKind::WiFi, InterfaceState::Active},
        {SimTime{2000000}, InterfaceKind::Bluetooth, InterfaceState::WakingUp},
        {SimTime{2000000}, InterfaceKind::WiFi, InterfaceState::Off},
    };
    EnergyLedger led = ledger_from_trace(InterfaceState::Sleep, InterfaceState::Off,
                                         changes, SimTime{0}, SimTime{3000000});
    const double expect_wifi = 495.05 + 660.09 + 213.75;
    const double expect_bt = 38.20 * 2.0 + (417.98 / 3.03);
    CHECK(led.total_mj(P(), InterfaceKind::WiFi) == doctest::Approx(expect_wifi));
    CHECK(led.total_mj(P(), InterfaceKind::Bluetooth) == doctest::Approx(expect_bt));
    CHECK(led.total_mj(P()) == doctest::Approx(expect_wifi + expect_bt));

    // intervals tile [0, horizon] per interface
    std::uint64_t wifi_cover = 0;
    for (const auto& iv : led.intervals)
        if (iv.kind == InterfaceKind::WiFi)
            wifi_cover += iv.to.us - iv.from.us;
    CHECK(wifi_cover == 3000000);
}

TEST_CASE("ledger rejects malformed traces") {
    std::vector<StateChange> out_of_order = {
        {SimTime{20}, InterfaceKind::WiFi, InterfaceState::Active},
        {SimTime{10}, InterfaceKind::WiFi, InterfaceState::Sleep},
    };
    CHECK_THROWS_AS(ledger_from_trace(InterfaceState::Sleep, InterfaceState::Off,
                                      out_of_order, SimTime{0}, SimTime{100}),
                    std::invalid_argument);

    // Sleep -> WakingUp skips the required Off step
    std::vector<StateChange> illegal = {
        {SimTime{10}, InterfaceKind::WiFi, InterfaceState::WakingUp},
    };
    CHECK_THROWS_AS(ledger_from_trace(InterfaceState::Sleep, InterfaceState::Off,
                                      illegal, SimTime{0}, SimTime{100}),
                    std::invalid_argument);
}

TEST_CASE("savings fraction") {
    CHECK(savings_fraction(75.0, 100.0) == doctest::Approx(0.25));
    CHECK(savings_fraction(kCycleEnergyMj, kCycleBaselineMj) ==
          doctest::Approx(0.244229).epsilon(1e-4));
    CHECK_THROWS_AS(savings_fraction(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("savings versus sleep curve") {
    // Independent arithmetic: totals grow by the two-interface sleep powers.
    auto oracle = [](double t) {
        const double bt_path = kCycleEnergyMj + (79.24 + 213.75) * t;
        const double wf_path = kCycleBaselineMj + (495.05 + 38.20) * t;
        return 1.0 - bt_path / wf_path;
    };
    for (double t : {0.0, 10.0, 60.0, 300.0, 600.0, 3600.0})
        CHECK(savings_vs_sleep(P(), t) == doctest::Approx(oracle(t)).epsilon(1e-9));

    CHECK(savings_vs_sleep(P(), 0.0) == doctest::Approx(0.244229).epsilon(1e-4));
    CHECK(100.0 * savings_vs_sleep(P(), 600.0) == doctest::Approx(44.76).epsilon(0.001));
    // monotone increasing, bounded by the power ratio limit
    double prev = -1.0;
    for (double t = 0.0; t <= 10000.0; t += 500.0) {
        double s = savings_vs_sleep(P(), t);
        CHECK(s > prev);
        CHECK(s < 1.0 - 292.99 / 533.25);
        prev = s;
    }
}
