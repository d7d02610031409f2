#include "harpy/io/sweep.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "harpy/io/config.hpp"
#include "harpy/io/export.hpp"
#include "harpy/io/format.hpp"
#include "harpy/vlip/capture.hpp"
#include "harpy/vlip/vlip.hpp"

namespace harpy::io {

namespace {

std::string status_of(const sim::RunMetrics& m)
{
    if (m.blew_up) return "blew_up";
    if (m.fell) return "fell";
    return "ok";
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
}

}  // namespace

void fill_analytic(const sim::Scenario& sc, SweepRow& row)
{
    const double mass = sc.morphology.total_mass();
    const double g = sc.morphology.gravity;
    const double thrust = sc.gait.commanded_thrust(mass, g);
    row.thrust_fraction = thrust / (mass * g);
    row.push_impulse = sc.disturbances.empty() ? 0.0 : sc.disturbances.front().impulse.x();
    const double speed = sc.initial.com_velocity_xy.x() + row.push_impulse / mass;
    row.capture_offset = vlip::capture_point(speed, sc.gait.z0, mass, thrust, g);
    const double omega = std::sqrt(vlip::effective_gravity(mass, thrust, g) / sc.gait.z0);
    row.capturable_impulse =
        mass * vlip::capturable_push_speed(omega, sc.gait.step_period, sc.gait.max_step_length);
}

std::vector<SweepRow> run_sweep(const sim::Scenario& base, const SweepOptions& options)
{
    if (options.values.empty()) {
        throw ConfigError({{"values", 0, "sweep needs at least one value"}});
    }

    // Resolve every scenario up front so a bad path or value stops the sweep
    // before anything runs or is written.
    std::vector<sim::Scenario> scenarios;
    std::vector<ConfigIssue> issues;
    for (const std::string& value : options.values) {
        YAML::Node doc = resolved_node(base);
        try {
            set_path(doc, options.parameter, value);
            scenarios.push_back(parse_config(YAML::Dump(doc)).scenarios.front());
        } catch (const ConfigError& e) {
            for (ConfigIssue issue : e.issues()) {
                issue.message = "value '" + value + "': " + issue.message;
                issues.push_back(issue);
            }
        }
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }

    std::vector<SweepRow> rows(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            SweepRow& row = rows[i];
            row.index = i;
            row.value = options.values[i];
            try {
                fill_analytic(scenarios[i], row);
                const sim::RunResult result = sim::run_scenario(scenarios[i]);
                row.metrics = result.metrics;
                row.status = status_of(result.metrics);
                row.error = result.metrics.error;
                if (options.bundle_dir) {
                    write_bundle(*options.bundle_dir / ("run_" + std::to_string(i)), scenarios[i],
                                 result);
                }
            } catch (const std::exception& e) {
                row.status = "error";
                row.error = e.what();
            }
        }
    };
    const unsigned jobs =
        std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(scenarios.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    return rows;
}

void write_sweep_summary(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "index,value,status,fell,fall_time,steps,limit_cycle_residual,mean_com_height_error,"
           "peak_joint_torque,thruster_impulse,thrust_fraction,push_impulse,capture_offset,"
           "recovery_step_length,capturable_impulse,error\r\n";
    for (const SweepRow& r : rows) {
        const sim::RunMetrics& m = r.metrics;
        out << r.index << ',' << csv_text(r.value) << ',' << r.status << ',' << (m.fell ? 1 : 0)
            << ',' << format_double(m.fall_time) << ',' << m.steps << ','
            << format_double(m.limit_cycle_residual) << ',' << format_double(m.mean_com_height_error)
            << ',' << format_double(m.peak_joint_torque) << ',' << format_double(m.thruster_impulse)
            << ',' << format_double(r.thrust_fraction) << ',' << format_double(r.push_impulse) << ','
            << format_double(r.capture_offset) << ',' << format_double(m.recovery_step_length) << ','
            << format_double(r.capturable_impulse) << ',' << csv_text(r.error) << "\r\n";
    }
}

}  // namespace harpy::io
