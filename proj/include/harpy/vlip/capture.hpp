#pragma once

#include <stdexcept>
#include <string>

#include "harpy/kinematics/morphology.hpp"
#include "harpy/vlip/vlip.hpp"

namespace harpy::vlip {

using kinematics::Side;

class InvalidGaitConfig : public std::invalid_argument {
public:
    InvalidGaitConfig(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Walking parameters shared by the planner, scheduler and swing generator.
struct GaitConfig {
    double z0 = 0.4;                  // nominal CoM height, m
    double step_period = 0.4;         // s
    double step_width = 0.24;         // nominal lateral foot spacing, m
    double desired_speed = 0.0;       // forward walking speed, m/s
    double max_step_length = 0.2;     // sagittal reach from the CoM, m
    double max_step_width = 0.35;     // frontal reach from the CoM, m
    double min_foot_separation = 0.0; // lateral gap kept from the stance foot, m
    double thrust_fraction = 0.5;     // commanded vertical thrust / (m g)
    double max_thrust_fraction = 0.9; // planner saturation
    double early_step_energy = 0.5;   // m²/s²
    double min_stance_time = 0.15;    // s
    double airborne_grace = 0.2;      // s
    double apex_height = 0.05;        // swing clearance, m
    double touchdown_depth = 0.005;   // swing target below ground, m

    void validate() const;

    /// Saturated vertical thrust magnitude for the given mass.
    double commanded_thrust(double mass, double gravity) const;
};

struct PlaneCapture {
    double capture_offset = 0.0;  // ẋ / ω
    double bias = 0.0;            // periodic-gait offset added to the capture offset
    double step = 0.0;            // commanded target minus CoM, after clamping
    double energy = 0.0;          // orbital energy about the current CoP
    bool clamped = false;
};

struct CapturePlan {
    Side stance = Side::left;
    Side swing = Side::right;
    PlaneCapture sagittal;
    PlaneCapture frontal;
    Vec3 target = Vec3::Zero();  // foot target on the ground
    double g_eff = 0.0;
    double omega = 0.0;          // √(g'/z0)
    double step_period = 0.0;
    bool clamped = false;        // either plane saturated
    bool step_due = false;       // timer expired or energy above threshold
    bool early = false;          // step_due triggered by energy
};

/// Capture-point step target for the swing leg, planes treated separately:
///   sagittal  x_c + ẋ/ω − v_des T / (e^{ωT} − 1)
///   frontal   y_c + ẏ/ω ± w / (1 + e^{ωT})   (+ when the new stance is left)
/// clamped to the per-plane reach and the minimum foot separation.
CapturePlan plan_step(const VlipState& state, const ThrustCommand& thrust, const GaitConfig& gait,
                      Side swing, double time_in_stance);

/// Largest sagittal push speed (applied with the CoM over a fresh stance foot)
/// that repeated steps of reach L at period T can absorb:
///   v_max = ω L coth(ωT/2) / cosh(ωT).
double capturable_push_speed(double omega, double step_period, double max_step);

}  // namespace harpy::vlip
