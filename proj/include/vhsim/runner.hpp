#ifndef VHSIM_RUNNER_HPP
#define VHSIM_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vhsim/scenario.hpp"

namespace vhsim {

// Rendered outputs of one simulation run. Regenerating with the same
// scenario and seed yields byte-identical strings.
struct ScenarioReport {
    std::uint64_t seed = 0;
    std::string summary_txt;
    std::string traffic_csv;
    std::string handovers_csv;
    std::string energy_csv;
    std::string trace; // empty unless tracing was requested
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

ScenarioReport run_scenario(const Scenario& sc,
                            std::optional<std::uint64_t> seed_override = {},
                            bool with_trace = false);

// Writes summary.txt, traffic.csv, handovers.csv, energy.csv and (when
// present) trace.tsv under dir, creating it if needed. Returns false and
// fills err on I/O failure.
bool write_report(const ScenarioReport& r, const std::string& dir,
                  std::string* err = nullptr);

} // namespace vhsim

#endif
