// Command line front end: simulate / validate / reproduce.
// Exit codes: 0 success, 1 invariant violation, 2 input or usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "vhsim/reproduce.hpp"
#include "vhsim/runner.hpp"
#include "vhsim/scenario.hpp"

namespace {

enum class LogLevel { Info, Debug };

LogLevel log_level() {
    const char* v = std::getenv("SIM_LOG");
    if (v && std::string(v) == "debug")
        return LogLevel::Debug;
    return LogLevel::Info;
}

void debugf(const std::string& msg) {
    if (log_level() == LogLevel::Debug)
        std::cerr << "[debug] " << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const std::string& path, const std::string& body, std::string* err) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        if (err)
            *err = "cannot write " + path;
        return false;
    }
    out << body;
    return true;
}

int cmd_simulate(const std::string& path, std::optional<std::uint64_t> seed,
                 const std::string& trace_path, const std::string& out_dir) {
    vhsim::Scenario sc;
    try {
        sc = vhsim::parse_scenario(read_file(path));
    } catch (const vhsim::ScenarioError& e) {
        std::cerr << e.render() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    debugf("parsed " + std::to_string(sc.devices.size()) + " devices, " +
           std::to_string(sc.flows.size()) + " flows");

    const bool want_trace = !trace_path.empty();
    vhsim::ScenarioReport rep = vhsim::run_scenario(sc, seed, want_trace);
    debugf("run finished, seed " + std::to_string(rep.seed));

    std::cout << rep.summary_txt;
    if (want_trace) {
        std::string err;
        if (!write_file(trace_path, rep.trace, &err)) {
            std::cerr << "error: " << err << "\n";
            return 2;
        }
    }
    if (!out_dir.empty()) {
        std::string err;
        if (!vhsim::write_report(rep, out_dir, &err)) {
            std::cerr << "error: " << err << "\n";
            return 2;
        }
    }
    if (!rep.ok()) {
        for (const auto& v : rep.violations)
            std::cerr << "violation: " << v << "\n";
        return 1;
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    try {
        vhsim::Scenario sc = vhsim::parse_scenario(read_file(path));
        std::cout << "ok: " << sc.devices.size() << " devices, " << sc.networks.size()
                  << " networks, " << sc.flows.size() << " flows\n";
        return 0;
    } catch (const vhsim::ScenarioError& e) {
        std::cerr << e.render() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_reproduce(const std::string& which, const std::string& out_dir) {
    try {
        std::string text;
        std::string csv;
        std::string stem = which;
        if (which == "energy") {
            text = vhsim::reproduce_energy().render();
        } else if (which == "handover") {
            vhsim::HandoverReproduction r = vhsim::reproduce_handover();
            text = r.render();
            csv = r.csv();
        } else if (which == "relay-qos") {
            vhsim::RelayReproduction r = vhsim::reproduce_relay_qos();
            text = r.render();
            csv = r.csv();
            stem = "relay_qos";
        } else {
            std::cerr << "error: unknown reproduction '" << which
                      << "' (expected energy, handover or relay-qos)\n";
            return 2;
        }
        std::cout << text;
        if (!out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) {
                std::cerr << "error: cannot create " << out_dir << "\n";
                return 2;
            }
            std::string err;
            if (!write_file(out_dir + "/" + stem + ".txt", text, &err)) {
                std::cerr << "error: " << err << "\n";
                return 2;
            }
            if (!csv.empty() && !write_file(out_dir + "/" + stem + ".csv", csv, &err)) {
                std::cerr << "error: " << err << "\n";
                return 2;
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic vertical-handover network simulator"};
    app.require_subcommand(1);

    std::string sim_path;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
    std::string out_dir;
    CLI::App* sim = app.add_subcommand("simulate", "run a scenario file");
    sim->add_option("file", sim_path, "scenario file")->required();
    sim->add_option("--seed", seed, "override the scenario seed");
    sim->add_option("--trace", trace_path, "write the event trace to this path");
    sim->add_option("--out", out_dir, "write the report files into this directory");

    std::string val_path;
    CLI::App* val = app.add_subcommand("validate", "parse and validate a scenario file");
    val->add_option("file", val_path, "scenario file")->required();

    std::string which;
    std::string rep_out;
    CLI::App* rep = app.add_subcommand("reproduce", "regenerate a built-in result set");
    rep->add_option("which", which, "energy, handover or relay-qos")->required();
    rep->add_option("--out", rep_out, "write the text/csv output into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (sim->parsed())
        return cmd_simulate(sim_path, seed, trace_path, out_dir);
    if (val->parsed())
        return cmd_validate(val_path);
    return cmd_reproduce(which, rep_out);
}
