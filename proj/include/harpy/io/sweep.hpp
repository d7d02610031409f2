#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "harpy/sim/runner.hpp"

namespace harpy::io {

struct SweepOptions {
    std::string parameter;            // dotted path into the resolved scenario
    std::vector<std::string> values;  // YAML scalars
    unsigned jobs = 1;
    /// When set, each run writes its bundle to <dir>/run_<index>.
    std::optional<std::filesystem::path> bundle_dir;
};

struct SweepRow {
    std::size_t index = 0;
    std::string value;
    std::string status;  // ok, fell, blew_up, error
    sim::RunMetrics metrics;
    double thrust_fraction = 0.0;
    double push_impulse = 0.0;        // sagittal impulse of the first disturbance, N·s
    /// ẋ/ω' for the CoM speed right after the first push (initial speed without one).
    double capture_offset = 0.0;
    /// Largest sagittal push the planner's step-length limit can absorb, N·s.
    double capturable_impulse = 0.0;
    std::string error;
};

/// Analytic columns of a row for a resolved scenario.
void fill_analytic(const sim::Scenario& scenario, SweepRow& row);

/// Builds one scenario per value by overriding the parameter in the resolved
/// base, then runs them on a worker pool. Per-run failures are recorded in
/// their row and the sweep continues. Throws ConfigError before running
/// anything if values is empty or the path or a value is invalid.
std::vector<SweepRow> run_sweep(const sim::Scenario& base, const SweepOptions& options);

void write_sweep_summary(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace harpy::io
