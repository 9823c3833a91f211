#ifndef VHSIM_REPRODUCE_HPP
#define VHSIM_REPRODUCE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vhsim/handover.hpp"

namespace vhsim {

// Pure-arithmetic regeneration of the energy-cycle figures. Seed-independent.
struct EnergyReproduction {
    double wake_bt_mw = 0.0;
    double wake_wifi_mw = 0.0;
    // switch-down/switch-up cycle, proposed path
    double seg_bt_wakeup_mj = 0.0;
    double seg_bt_active_mj = 0.0;
    double seg_wifi_wakeup_mj = 0.0;
    // same spans with Wi-Fi kept up
    double base_sleep_mj = 0.0;
    double base_active_mj = 0.0;
    double base_wakeup_mj = 0.0;
    // the anchored totals differ from the segment sums; both are reported
    double stated_proposed_mj = 0.0;
    double stated_baseline_mj = 0.0;
    double sum_proposed_mj = 0.0;
    double sum_baseline_mj = 0.0;
    double savings_t0_pct = 0.0;
    std::vector<std::pair<double, double>> curve; // (sleep_s, savings_pct)

    std::string render() const;
};

EnergyReproduction reproduce_energy();

struct CiStat {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;      // sample standard deviation
    double ci_half = 0.0; // 1.96 * sd / sqrt(n)
    double min = 0.0;
    double max = 0.0;
};

CiStat ci_of(const std::vector<double>& xs);

struct HandoverGroup {
    HandoverDirection direction = HandoverDirection::BluetoothToWiFi;
    double rate_kbps = 0.0;
    CiStat config_ms;
    CiStat rule_ms;
    CiStat delay_ms;
};

struct HandoverReproduction {
    std::vector<HandoverGroup> groups; // ordered by (direction, rate)
    std::vector<double> b2w_delays;
    std::vector<double> w2b_delays;
    std::vector<double> w2b_configs;
    std::vector<double> w2b_rules;
    double max_delay_ms = 0.0;
    std::size_t committed = 0;
    std::size_t aborted = 0;

    std::string render() const;
    std::string csv() const;
};

HandoverReproduction reproduce_handover(std::size_t seeds = 30);

struct RelayPoint {
    double rate_kbps = 0.0;
    CiStat jitter_ms;   // per-run average jitter
    CiStat loss_pct;    // per-run loss percentage
};

struct RelayReproduction {
    std::vector<RelayPoint> points;

    std::string render() const;
    std::string csv() const;
};

RelayReproduction reproduce_relay_qos(std::size_t seeds = 30);

// Built-in scenario texts used by the reproductions (and reusable in tests).
// ideal_links swaps in zero jitter; loss defaults to zero either way.
std::string handover_scenario_text(HandoverDirection dir, double rate_kbps);
std::string relay_scenario_text(double rate_kbps, bool ideal_links = false);

} // namespace vhsim

#endif
