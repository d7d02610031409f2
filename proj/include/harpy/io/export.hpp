#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "harpy/sim/runner.hpp"

namespace harpy::io {

/// Header plus one row per sample, shortest round-trip number text.
void write_trajectory_csv(std::ostream& out, const sim::TrajectoryLog& log);
/// One row per step event.
void write_events_csv(std::ostream& out, const sim::TrajectoryLog& log);

/// Non-finite numbers become null and read back as NaN.
nlohmann::json metrics_to_json(const sim::RunMetrics& m);
sim::RunMetrics metrics_from_json(const nlohmann::json& j);

/// Writes trajectory.csv, events.csv, metrics.json and scenario.resolved
/// into dir (created if missing). Throws std::runtime_error on I/O failure.
void write_bundle(const std::filesystem::path& dir, const sim::Scenario& scenario,
                  const sim::RunResult& result);

/// Minimal RFC-4180 reader for the files above (quoted fields, "" escapes).
std::vector<std::vector<std::string>> read_csv(std::istream& in);

}  // namespace harpy::io
