#include "harpy/io/export.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "harpy/io/config.hpp"
#include "harpy/io/format.hpp"

namespace harpy::io {

namespace {

using nlohmann::json;

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json& j, const char* key)
{
    const json& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    return out;
}

std::string quote_if_needed(const std::string& s)
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

void write_trajectory_csv(std::ostream& out, const sim::TrajectoryLog& log)
{
    for (std::size_t i = 0; i < log.columns.size(); ++i) {
        out << (i ? "," : "") << quote_if_needed(log.columns[i]);
    }
    out << "\r\n";
    for (const auto& row : log.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << "\r\n";
    }
}

void write_events_csv(std::ostream& out, const sim::TrajectoryLog& log)
{
    out << "t,stance,cop_x,cop_y,cop_z,com_x,com_y,com_z,com_vx,com_vy,com_vz,clamped\r\n";
    for (const sim::StepEvent& e : log.events) {
        out << format_double(e.time) << ',' << kinematics::to_string(e.stance);
        for (const math::Vec3* v : {&e.cop, &e.com, &e.com_velocity}) {
            for (int i = 0; i < 3; ++i) {
                out << ',' << format_double((*v)[i]);
            }
        }
        out << ',' << (e.clamped ? 1 : 0) << "\r\n";
    }
}

json metrics_to_json(const sim::RunMetrics& m)
{
    json residuals = json::array();
    for (double r : m.limit_cycle_residuals) {
        residuals.push_back(number(r));
    }
    return json{
        {"fell", m.fell},
        {"fall_time", number(m.fall_time)},
        {"fall_reason", m.fall_reason},
        {"blew_up", m.blew_up},
        {"error", m.error},
        {"simulated_time", number(m.simulated_time)},
        {"steps", m.steps},
        {"limit_cycle_residuals", residuals},
        {"limit_cycle_residual", number(m.limit_cycle_residual)},
        {"cycles_to_converge", m.cycles_to_converge},
        {"mean_com_height_error", number(m.mean_com_height_error)},
        {"max_com_height_error", number(m.max_com_height_error)},
        {"peak_joint_torque", number(m.peak_joint_torque)},
        {"peak_knee_torque", number(m.peak_knee_torque)},
        {"thruster_impulse", number(m.thruster_impulse)},
        {"min_normal_force", number(m.min_normal_force)},
        {"energy_audit_error", number(m.energy_audit_error)},
        {"clamped_steps", m.clamped_steps},
        {"infeasible_samples", m.infeasible_samples},
        {"recovery_step_length", number(m.recovery_step_length)},
    };
}

sim::RunMetrics metrics_from_json(const json& j)
{
    sim::RunMetrics m;
    m.fell = j.at("fell").get<bool>();
    m.fall_time = number_from(j, "fall_time");
    m.fall_reason = j.at("fall_reason").get<std::string>();
    m.blew_up = j.at("blew_up").get<bool>();
    m.error = j.at("error").get<std::string>();
    m.simulated_time = number_from(j, "simulated_time");
    m.steps = j.at("steps").get<int>();
    for (const json& r : j.at("limit_cycle_residuals")) {
        m.limit_cycle_residuals.push_back(r.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : r.get<double>());
    }
    m.limit_cycle_residual = number_from(j, "limit_cycle_residual");
    m.cycles_to_converge = j.at("cycles_to_converge").get<int>();
    m.mean_com_height_error = number_from(j, "mean_com_height_error");
    m.max_com_height_error = number_from(j, "max_com_height_error");
    m.peak_joint_torque = number_from(j, "peak_joint_torque");
    m.peak_knee_torque = number_from(j, "peak_knee_torque");
    m.thruster_impulse = number_from(j, "thruster_impulse");
    m.min_normal_force = number_from(j, "min_normal_force");
    m.energy_audit_error = number_from(j, "energy_audit_error");
    m.clamped_steps = j.at("clamped_steps").get<int>();
    m.infeasible_samples = j.at("infeasible_samples").get<int>();
    m.recovery_step_length = number_from(j, "recovery_step_length");
    return m;
}

void write_bundle(const std::filesystem::path& dir, const sim::Scenario& scenario,
                  const sim::RunResult& result)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    {
        auto out = open_out(dir / "trajectory.csv");
        write_trajectory_csv(out, result.log);
    }
    {
        auto out = open_out(dir / "events.csv");
        write_events_csv(out, result.log);
    }
    {
        auto out = open_out(dir / "metrics.json");
        out << metrics_to_json(result.metrics).dump(2) << "\n";
    }
    {
        auto out = open_out(dir / "scenario.resolved");
        out << emit_resolved(scenario);
    }
}

std::vector<std::vector<std::string>> read_csv(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c = 0;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
        } else if (c == '\r') {
            continue;
        } else if (c == '\n') {
            row.push_back(field);
            rows.push_back(row);
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (any) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace harpy::io
