// Command-line front end: run, sweep, validate.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 config error, 3 fall, 4 blow-up.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "harpy/io/config.hpp"
#include "harpy/io/export.hpp"
#include "harpy/io/format.hpp"
#include "harpy/io/sweep.hpp"
#include "harpy/sim/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFall = 3;
constexpr int kExitBlowUp = 4;

using harpy::io::format_double;

void report(const harpy::io::ConfigError& e)
{
    std::cerr << "config error:\n";
    for (const auto& issue : e.issues()) {
        std::cerr << "  " << issue.to_string() << "\n";
    }
}

/// Single scenario from a config: by name, or the only one present.
const harpy::sim::Scenario& pick(const harpy::io::ConfigFile& cfg, const std::string& name)
{
    if (name.empty()) {
        if (cfg.scenarios.size() == 1) {
            return cfg.scenarios.front();
        }
        std::string available;
        for (const auto& n : cfg.scenario_names()) {
            available += (available.empty() ? "" : ", ") + n;
        }
        throw harpy::io::ConfigError(
            {{"scenario", 0, "config has several scenarios; pass --scenario (available: " + available + ")"}});
    }
    return cfg.scenario(name);
}

int cmd_run(const std::string& config, const std::string& name, const std::string& out)
{
    const auto cfg = harpy::io::load_config(config);
    const auto& scenario = pick(cfg, name);
    const auto result = harpy::sim::run_scenario(scenario);
    const std::filesystem::path dir = std::filesystem::path(out) / scenario.name;
    harpy::io::write_bundle(dir, scenario, result);

    const auto& m = result.metrics;
    std::cout << scenario.name << " (" << harpy::sim::to_string(scenario.plant) << "): "
              << "t=" << format_double(m.simulated_time) << " s, steps=" << m.steps
              << ", residual=" << format_double(m.limit_cycle_residual)
              << ", mean height error=" << format_double(m.mean_com_height_error) << " m"
              << ", thruster impulse=" << format_double(m.thruster_impulse) << " N*s\n"
              << "bundle: " << dir.string() << "\n";
    if (m.blew_up) {
        std::cerr << "blow-up: " << m.error << "\n";
        return kExitBlowUp;
    }
    if (m.fell) {
        std::cerr << "fell at t=" << format_double(m.fall_time) << " s: " << m.fall_reason << "\n";
        return kExitFall;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& name, const std::string& param,
              const std::vector<std::string>& values, const std::string& out, unsigned jobs)
{
    const auto cfg = harpy::io::load_config(config);
    const auto& scenario = pick(cfg, name);
    harpy::io::SweepOptions opts;
    opts.parameter = param;
    opts.values = values;
    opts.jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    const std::filesystem::path dir = std::filesystem::path(out) / (scenario.name + "_sweep");
    opts.bundle_dir = dir;
    const auto rows = harpy::io::run_sweep(scenario, opts);

    std::filesystem::create_directories(dir);
    std::ofstream summary(dir / "sweep_summary.csv", std::ios::binary);
    if (!summary) {
        throw std::runtime_error("cannot write " + (dir / "sweep_summary.csv").string());
    }
    harpy::io::write_sweep_summary(summary, rows);
    harpy::io::write_sweep_summary(std::cout, rows);
    return kExitOk;
}

int cmd_validate(const std::string& config)
{
    const auto issues = harpy::io::check_config_file(config);
    if (issues.empty()) {
        std::cout << config << ": ok\n";
        return kExitOk;
    }
    std::cout << config << ": " << issues.size() << " violation(s)\n";
    for (const auto& issue : issues) {
        std::cout << "  " << issue.to_string() << "\n";
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Thruster-assisted biped simulator"};
    app.require_subcommand(1);

    std::string config;
    std::string scenario;
    std::string out = "out";
    std::string param;
    std::vector<std::string> values;
    unsigned jobs = 1;

    auto* run = app.add_subcommand("run", "Run one scenario and write its bundle");
    run->add_option("--config", config, "YAML config")->required()->check(CLI::ExistingFile);
    run->add_option("--scenario", scenario, "Scenario name");
    run->add_option("--out", out, "Output directory")->envname("HARPY_OUT_DIR");

    auto* sweep = app.add_subcommand("sweep", "Run one scenario per parameter value");
    sweep->add_option("--config", config, "YAML config")->required()->check(CLI::ExistingFile);
    sweep->add_option("--scenario", scenario, "Scenario name");
    sweep->add_option("--param", param, "Dotted parameter path, e.g. gait.thrust_fraction")->required();
    sweep->add_option("--values", values, "Values (comma separated or repeated)")
        ->delimiter(',')
        ->required();
    sweep->add_option("--out", out, "Output directory")->envname("HARPY_OUT_DIR");
    sweep->add_option("--jobs", jobs, "Worker threads (0 = hardware concurrency)")->envname("HARPY_JOBS");

    auto* validate = app.add_subcommand("validate", "Check a config without simulating");
    validate->add_option("--config", config, "YAML config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (*run) return cmd_run(config, scenario, out);
        if (*sweep) return cmd_sweep(config, scenario, param, values, out, jobs);
        return cmd_validate(config);
    } catch (const harpy::io::ConfigError& e) {
        report(e);
        return kExitConfig;
    } catch (const harpy::sim::InvalidScenario& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
