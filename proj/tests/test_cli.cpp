#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "harpy/io/config.hpp"
#include "harpy/io/export.hpp"
#include "harpy/io/sweep.hpp"

namespace harpy::io {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_config_text() { return read_file(HARPY_DEFAULT_CONFIG); }

/// Replaces the first occurrence of needle in the default config.
std::string patched(const std::string& needle, const std::string& replacement)
{
    std::string text = default_config_text();
    const auto at = text.find(needle);
    EXPECT_NE(at, std::string::npos) << needle;
    return text.replace(at, needle.size(), replacement);
}

bool mentions(const std::vector<ConfigIssue>& issues, const std::string& key, const std::string& text = "")
{
    for (const auto& i : issues) {
        if (i.key == key && i.message.find(text) != std::string::npos) {
            return true;
        }
    }
    return false;
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("harpy_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

TEST(Config, DefaultIsValid)
{
    EXPECT_TRUE(check_config(default_config_text()).empty());
    const ConfigFile cfg = load_config(HARPY_DEFAULT_CONFIG);
    EXPECT_EQ(cfg.scenario_names(),
              (std::vector<std::string>{"vlip_walk", "full_order_walk", "full_order_stand", "vlip_push"}));
    EXPECT_EQ(cfg.scenario("vlip_walk").gait.desired_speed, 0.15);
    EXPECT_EQ(cfg.scenario("full_order_walk").gait.desired_speed, 0.0);
}

TEST(Config, NegativeMassNamesTheKeyAndLine)
{
    const auto issues = check_config(patched("m_B: 3.0", "m_B: -3.0"));
    ASSERT_TRUE(mentions(issues, "morphology.m_B"));
    for (const auto& i : issues) {
        if (i.key == "morphology.m_B") {
            EXPECT_GT(i.line, 0);
            EXPECT_NE(i.to_string().find("morphology.m_B"), std::string::npos);
        }
    }
}

TEST(Config, FrictionOrderingViolation)
{
    EXPECT_TRUE(mentions(check_config(patched("mu_c: 0.7", "mu_c: 1.2")), "ground.mu_s"));
}

TEST(Config, ThrustFractionAboveOneCitesEffectiveGravity)
{
    const auto issues = check_config(patched("thrust_fraction: 0.5", "thrust_fraction: 1.2"));
    EXPECT_TRUE(mentions(issues, "gait.thrust_fraction", "g'"));
}

TEST(Config, UnknownKeysAndTypeErrorsAreReported)
{
    EXPECT_TRUE(mentions(check_config(patched("k_gd: 300.0", "k_gd: 300.0\n  k_gx: 1.0")), "ground.k_gx"));
    EXPECT_FALSE(check_config(patched("k_gp: 8000.0", "k_gp: stiff")).empty());
    EXPECT_FALSE(check_config("morphology: [1, 2\n").empty());
}

TEST(Config, EveryViolationIsAggregated)
{
    std::string text = patched("m_B: 3.0", "m_B: -3.0");
    text.replace(text.find("mu_c: 0.7"), 9, "mu_c: 1.2");
    text.replace(text.find("thrust_fraction: 0.5"), 20, "thrust_fraction: 1.2");
    const auto issues = check_config(text);
    EXPECT_TRUE(mentions(issues, "morphology.m_B"));
    EXPECT_TRUE(mentions(issues, "ground.mu_s"));
    EXPECT_TRUE(mentions(issues, "gait.thrust_fraction"));
    try {
        parse_config(text);
        FAIL() << "invalid config parsed";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.issues(), issues);
    }
}

TEST(Config, UnknownScenarioListsAvailable)
{
    const ConfigFile cfg = load_config(HARPY_DEFAULT_CONFIG);
    try {
        cfg.scenario("moonwalk");
        FAIL() << "missing scenario found";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("vlip_walk"), std::string::npos);
    }
}

TEST(Config, ResolvedRoundTripReproducesRun)
{
    const ConfigFile cfg = load_config(HARPY_DEFAULT_CONFIG);
    sim::Scenario sc = cfg.scenario("vlip_push");
    sc.duration = 2.0;
    const std::string text = emit_resolved(sc);
    const ConfigFile again = parse_config(text);
    ASSERT_EQ(again.scenarios.size(), 1u);
    EXPECT_EQ(emit_resolved(again.scenarios.front()), text);
    const auto a = sim::run_scenario(sc);
    const auto b = sim::run_scenario(again.scenarios.front());
    ASSERT_EQ(a.log.rows.size(), b.log.rows.size());
    for (std::size_t i = 0; i < a.log.rows.size(); ++i) {
        ASSERT_EQ(a.log.rows[i], b.log.rows[i]);
    }
}

TEST(Config, SetPathOverridesExistingKeysOnly)
{
    const sim::Scenario sc = load_config(HARPY_DEFAULT_CONFIG).scenario("vlip_push");
    YAML::Node root = resolved_node(sc);
    set_path(root, "gait.thrust_fraction", "0.25");
    set_path(root, "scenarios.0.disturbances.0.impulse.0", "1.5");
    const sim::Scenario changed = parse_config(YAML::Dump(root)).scenarios.front();
    EXPECT_EQ(changed.gait.thrust_fraction, 0.25);
    EXPECT_EQ(changed.disturbances.front().impulse.x(), 1.5);
    EXPECT_THROW(set_path(root, "gait.no_such_key", "1"), ConfigError);
}

TEST(Export, CsvSchemaIsStableAndReadable)
{
    sim::Scenario sc = load_config(HARPY_DEFAULT_CONFIG).scenario("vlip_walk");
    sc.duration = 1.0;
    const auto result = sim::run_scenario(sc);
    std::stringstream csv;
    write_trajectory_csv(csv, result.log);
    const auto table = read_csv(csv);
    ASSERT_EQ(table.size(), result.log.rows.size() + 1);
    EXPECT_EQ(table.front(), sim::log_columns(sim::Plant::vlip));
    for (std::size_t i = 1; i < table.size(); ++i) {
        ASSERT_EQ(table[i].size(), table.front().size());
        for (std::size_t k = 0; k < table[i].size(); ++k) {
            ASSERT_EQ(std::stod(table[i][k]), result.log.rows[i - 1][k]);
        }
    }
}

TEST(Export, ReadCsvHandlesQuotedFields)
{
    std::stringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,2,3\n");
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Export, MetricsJsonRoundTrip)
{
    sim::RunMetrics m;
    m.fell = true;
    m.fall_time = 1.25;
    m.fall_reason = "test";
    m.steps = 7;
    m.limit_cycle_residuals = {0.5, 0.1, 1.0 / 3.0};
    m.peak_knee_torque = 3.0e-7;
    const sim::RunMetrics back = metrics_from_json(nlohmann::json::parse(metrics_to_json(m).dump()));
    EXPECT_EQ(metrics_to_json(back), metrics_to_json(m));
    EXPECT_TRUE(std::isnan(back.limit_cycle_residual));
    EXPECT_EQ(back.limit_cycle_residuals, m.limit_cycle_residuals);
    EXPECT_TRUE(metrics_to_json(m)["limit_cycle_residual"].is_null());
}

TEST(Export, BundleContainsAllFiles)
{
    TempDir dir;
    sim::Scenario sc = load_config(HARPY_DEFAULT_CONFIG).scenario("vlip_walk");
    sc.duration = 0.5;
    write_bundle(dir.path() / "b", sc, sim::run_scenario(sc));
    for (const char* f : {"trajectory.csv", "events.csv", "metrics.json", "scenario.resolved"}) {
        EXPECT_TRUE(fs::exists(dir.path() / "b" / f)) << f;
    }
}

TEST(Sweep, EmptyValuesRejectedBeforeRunning)
{
    SweepOptions opts;
    opts.parameter = "gait.thrust_fraction";
    EXPECT_THROW(run_sweep(sim::Scenario(), opts), ConfigError);
    opts.values = {"0.2"};
    opts.parameter = "gait.nope";
    EXPECT_THROW(run_sweep(sim::Scenario(), opts), ConfigError);
}

TEST(Sweep, ThrustSweepAnalyticColumnsIncrease)
{
    sim::Scenario sc = load_config(HARPY_DEFAULT_CONFIG).scenario("vlip_push");
    sc.duration = 1.0;
    SweepOptions opts;
    opts.parameter = "gait.thrust_fraction";
    opts.values = {"0.0", "0.25", "0.5"};
    opts.jobs = 2;
    const auto rows = run_sweep(sc, opts);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].index, i);
        EXPECT_EQ(rows[i].status, "ok");
        EXPECT_EQ(rows[i].thrust_fraction, std::stod(opts.values[i]));
        if (i > 0) {
            EXPECT_GT(rows[i].capture_offset, rows[i - 1].capture_offset);
            EXPECT_GT(rows[i].capturable_impulse, rows[i - 1].capturable_impulse);
        }
    }
    std::stringstream out;
    write_sweep_summary(out, rows);
    EXPECT_EQ(read_csv(out).size(), 4u);
}

int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + HARPY_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes)
{
    TempDir dir;
    const fs::path log = dir.path() / "out.txt";
    const std::string cfg = std::string("--config \"") + HARPY_DEFAULT_CONFIG + "\"";

    EXPECT_EQ(run_cli("validate " + cfg, log), 0);

    const fs::path bad = dir.path() / "bad.yaml";
    std::ofstream(bad) << patched("m_B: 3.0", "m_B: -3.0");
    EXPECT_EQ(run_cli("validate --config \"" + bad.string() + "\"", log), 2);
    EXPECT_NE(read_file(log).find("morphology.m_B"), std::string::npos);

    EXPECT_EQ(run_cli("run " + cfg + " --scenario moonwalk", log), 2);
    EXPECT_NE(read_file(log).find("vlip_walk"), std::string::npos);

    EXPECT_EQ(run_cli("run --config \"" + (dir.path() / "missing.yaml").string() + "\"", log), 1);

    const fs::path fall = dir.path() / "fall.yaml";
    std::ofstream(fall) << patched("max_step_length: 0.2", "max_step_length: 0.02");
    EXPECT_EQ(run_cli("run --config \"" + fall.string() + "\" --scenario vlip_push --out \"" +
                          (dir.path() / "o").string() + "\"",
                      log),
              3);
    EXPECT_TRUE(fs::exists(dir.path() / "o" / "vlip_push" / "metrics.json"));
}

}  // namespace
}  // namespace harpy::io
