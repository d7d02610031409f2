#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "harpy/contact/ground.hpp"
#include "harpy/kinematics/morphology.hpp"
#include "harpy/sim/tracking.hpp"
#include "harpy/vlip/capture.hpp"

namespace harpy::sim {

class InvalidScenario : public std::invalid_argument {
public:
    InvalidScenario(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class Plant { vlip, full_order };
const char* to_string(Plant p);

/// Instantaneous change of CoM momentum.
struct Disturbance {
    double time = 0.0;          // s
    Vec3 impulse = Vec3::Zero(); // N·s
};

struct InitialCondition {
    Eigen::Vector2d com_xy = Eigen::Vector2d::Zero();
    Eigen::Vector2d com_velocity_xy = Eigen::Vector2d::Zero();
    Side stance = Side::left;
    /// Pendulum plant: stance foot (CoP) on the ground.
    Eigen::Vector2d stance_foot_xy{0.0, 0.12};
    /// Full-order plant: feet start this far above the ground with the CoM
    /// z0 above the feet.
    double drop_height = 0.02;
    double stance_width = 0.24;
    /// Standard deviation of a seeded perturbation of the initial CoM velocity.
    double velocity_noise = 0.0;
};

struct Scenario {
    std::string name = "scenario";
    Plant plant = Plant::vlip;
    kinematics::RobotMorphology morphology;
    contact::GroundModelParams ground;
    vlip::GaitConfig gait;
    ControllerGains gains;
    InitialCondition initial;
    bool walking = true;
    std::vector<Disturbance> disturbances;
    double duration = 10.0;      // s
    double control_rate = 1000.0; // Hz
    double dt = 1e-4;            // s
    double log_rate = 500.0;     // Hz
    std::uint64_t seed = 1;
    double poincare_threshold = 1e-3;

    /// Validates every section, then the scenario's own fields. Throws the
    /// section's exception type or InvalidScenario naming the first violation.
    void validate() const;
    /// Scenario-level fields only; throws InvalidScenario.
    void validate_fields() const;
    /// Physics steps per control tick (control_rate · dt must divide 1).
    int substeps() const;
};

struct StepEvent {
    double time = 0.0;
    Side stance = Side::left;   // new stance leg
    Vec3 cop = Vec3::Zero();    // new stance foot
    Vec3 com = Vec3::Zero();
    Vec3 com_velocity = Vec3::Zero();
    bool clamped = false;
};

/// Uniformly sampled log with a fixed per-plant column schema.
struct TrajectoryLog {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<StepEvent> events;
    double sample_rate = 0.0;

    /// Index of a named column; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
    std::vector<double> series(const std::string& name) const;
};

/// Column names for a plant, in CSV order.
std::vector<std::string> log_columns(Plant plant);

struct RunMetrics {
    bool fell = false;
    double fall_time = std::numeric_limits<double>::quiet_NaN();
    std::string fall_reason;
    bool blew_up = false;
    std::string error;
    double simulated_time = 0.0;
    int steps = 0;
    /// ‖s_k − s_{k−1}‖ at successive left touchdowns, s = (p_xy − c_xy, ṗ_xy).
    std::vector<double> limit_cycle_residuals;
    double limit_cycle_residual = std::numeric_limits<double>::quiet_NaN();
    /// Gait cycle (1-based) after which every residual stays below threshold; 0 if never.
    int cycles_to_converge = 0;
    double mean_com_height_error = 0.0;
    double max_com_height_error = 0.0;
    double peak_joint_torque = 0.0;  // hips and knee reaction, N·m
    double peak_knee_torque = 0.0;
    double thruster_impulse = 0.0;   // ∫ (|u_tL| + |u_tR|) dt, N·s
    double min_normal_force = 0.0;
    /// Largest |ΔE − ∫P dt| over consecutive 1 s windows (full-order plant).
    double energy_audit_error = 0.0;
    int clamped_steps = 0;
    int infeasible_samples = 0;
    /// Largest sagittal distance between consecutive stance feet after the first disturbance.
    double recovery_step_length = 0.0;
};

struct RunResult {
    TrajectoryLog log;
    RunMetrics metrics;
};

/// Deterministic fixed-step closed-loop simulation. Blow-ups end the run
/// early with the partial log and metrics.blew_up set.
RunResult run_scenario(const Scenario& scenario);

/// Full-order initial standing state for the scenario (feet drop_height above
/// ground, CoM z0 above the feet, upright, at rest).
dynamics::FullState initial_full_state(const Scenario& scenario);

}  // namespace harpy::sim
