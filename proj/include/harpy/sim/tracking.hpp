#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "harpy/dynamics/dynamics.hpp"
#include "harpy/kinematics/kinematics.hpp"
#include "harpy/sim/swing.hpp"

namespace harpy::sim {

using dynamics::ControlInput;
using dynamics::FullState;
using dynamics::Vector6;
using kinematics::RobotMorphology;
using kinematics::Side;

class InvalidGains : public std::invalid_argument {
public:
    InvalidGains(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Controller gains. Hip gains are in N·m/rad and N·m·s/rad, knee gains in
/// 1/s² and 1/s (the knee input is an acceleration), stand gains in 1/s² and
/// 1/s (scaled by total mass).
struct ControllerGains {
    double stance_frontal_kp = 60.0;
    double stance_frontal_kd = 4.0;
    double stance_sagittal_kp = 300.0;
    double stance_sagittal_kd = 12.0;
    double swing_hip_kp = 15.0;
    double swing_hip_kd = 0.5;
    double knee_kp = 900.0;
    double knee_kd = 60.0;
    double attitude_kp = 40.0;
    double attitude_kd = 4.0;
    double stand_kp = 20.0;
    double stand_kd = 9.0;
    double max_thrust = 20.0;    // per thruster, N
    double stand_shift = 0.12;   // lateral CoM offset inside the first stance foot, m
    double shift_duration = 0.3; // s
    double settle_time = 1.0;    // standing time before the first step, s

    void validate() const;
};

/// One joint servo channel: out = ff + kp (q_d − q) + kd (q̇_d − q̇).
struct JointSetpoint {
    double position = 0.0;
    double velocity = 0.0;
    double kp = 0.0;
    double kd = 0.0;
    double feedforward = 0.0;
};

/// Setpoints latched at the control rate and evaluated by the joint servos
/// at every physics evaluation; between ticks the position target advances
/// with the velocity target. Channel order matches ControlInput::joint:
/// [γ_L, γ_R, φ_hL, φ_hR, φ_kL, φ_kR].
struct ServoCommand {
    std::array<JointSetpoint, 6> joints{};
    Vector6 thrust = Vector6::Zero();

    /// elapsed: time since the setpoints were latched, s.
    ControlInput evaluate(const FullState& state, double elapsed = 0.0) const;
};

/// Joint coordinates and rates in the servo channel order.
Vector6 joint_positions(const FullState& state);
Vector6 joint_rates(const FullState& state);

struct ThrustAllocation {
    Vector6 forces = Vector6::Zero();  // [u_tL; u_tR]
    bool saturated = false;
};

/// Splits a net force F and torque τ (about the CoM) over two point thrusters
/// at lever arms r_L, r_R from the CoM: u = F/2 ± Δ with Δ ⊥ (r_L − r_R) the
/// minimum-norm solution for the torque component the pair can produce.
/// Each thruster is then limited to max_thrust.
ThrustAllocation allocate_thrust(const Vec3& lever_left, const Vec3& lever_right,
                                 const Vec3& force, const Vec3& torque, double max_thrust);

enum class TrackingMode { stand, walk };

struct TrackingRequest {
    TrackingMode mode = TrackingMode::stand;
    Side stance = Side::left;
    SwingReference swing;            // walk mode
    double z0 = 0.4;                 // CoM height target
    double vertical_thrust = 0.0;    // total, N
    double ground_stiffness = 8000.0; // per foot, N/m
    /// World-frame xy where each stance foot landed; unset feet use their
    /// current position.
    std::array<std::optional<Eigen::Vector2d>, 2> foot_anchor;
    Eigen::Vector2d com_reference = Eigen::Vector2d::Zero();   // stand mode
    Eigen::Vector2d com_reference_rate = Eigen::Vector2d::Zero();
};

struct TrackingOutput {
    ServoCommand command;
    ControlInput input;  // command evaluated at the current state
    bool ik_clamped = false;
    Vec3 attitude_torque = Vec3::Zero();  // requested from the thrusters, inertial
    bool thrust_saturated = false;
};

/// Maps a stance/swing assignment and references to joint servo setpoints
/// and thruster forces.
///
/// Stance legs hold their feet in place and press them into the ground by
/// the depth at which the contact springs carry m g', with the body at the
/// CoM height target. Walking solves stance inverse kinematics for an
/// upright body; standing solves it in the body frame, so the hips also
/// level the torso. The swing leg is solved for the swing reference
/// relative to the actual body.
/// Thrusters carry the vertical thrust plus a roll/yaw attitude PD; in stand
/// mode a horizontal thrust PD holds the CoM over the feet sagittally.
TrackingOutput whole_body_tracking(const RobotMorphology& morph, const FullState& state,
                                   const TrackingRequest& request, const ControllerGains& gains);

}  // namespace harpy::sim
