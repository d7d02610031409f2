#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "harpy/sim/runner.hpp"

namespace harpy::io {

/// One schema or physics violation. line is 1-based, 0 when unknown.
struct ConfigIssue {
    std::string key;
    int line = 0;
    std::string message;

    std::string to_string() const;
    bool operator==(const ConfigIssue&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// A parsed configuration: shared sections plus a list of scenarios, each
/// already merged with its own section overrides.
struct ConfigFile {
    std::string source;
    std::vector<sim::Scenario> scenarios;

    std::vector<std::string> scenario_names() const;
    /// Throws ConfigError listing the available names.
    const sim::Scenario& scenario(const std::string& name) const;
};

/// Schema and physics check of a YAML document. Every violation is reported;
/// nothing is simulated.
std::vector<ConfigIssue> check_config(const std::string& text);
std::vector<ConfigIssue> check_config_file(const std::filesystem::path& path);

/// Parses and validates; throws ConfigError with every violation found.
ConfigFile parse_config(const std::string& text, const std::string& source = "<string>");
ConfigFile load_config(const std::filesystem::path& path);

/// Complete single-scenario document: every section with every key at full
/// precision. parse_config(emit_resolved(s)) reproduces s exactly.
YAML::Node resolved_node(const sim::Scenario& scenario);
std::string emit_resolved(const sim::Scenario& scenario);

/// Replaces the value at a dotted path ("gait.thrust_fraction",
/// "scenarios.0.disturbances.0.impulse.0") in a resolved document. The path
/// must already exist; value_text is parsed as YAML. Throws ConfigError.
void set_path(YAML::Node& root, const std::string& path, const std::string& value_text);

}  // namespace harpy::io
