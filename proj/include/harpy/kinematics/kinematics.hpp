#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

#include "harpy/dynamics/state.hpp"
#include "harpy/kinematics/morphology.hpp"

namespace harpy::kinematics {

using dynamics::FullState;
using dynamics::kVelocityDim;
using dynamics::LegJoints;
using math::Rotation3;

using PointJacobian = Eigen::Matrix<double, 3, kVelocityDim>;

/// Largest knee angle magnitude for which the linkage solution is single-valued.
inline constexpr double kKneeLimit = 1.5707963267948966;

class KinematicsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inertial positions along one leg plus the thruster on the same side.
struct LegPositions {
    Vec3 pelvis;    // p_P
    Vec3 hip;       // p_H (hip motor CoM)
    Vec3 knee;      // p_K (knee motor CoM)
    Vec3 foot;      // p_F
    Vec3 thruster;  // p_T
};

/// Exact position chain: pelvis, hip and knee CoMs, then the foot through
/// the closed-form parallel-linkage vector
///   l4^K = [-l4a cos φk, 0, -(l4b + l4a sin φk)]
/// rotated by R_B R_x(γ) R_y(φh) R_y(φk), and the thruster at p_B + R_B lt.
///
/// Rejects R_B whose orthonormality error exceeds 1e-6 and |φk| >= π/2.
LegPositions forward_kinematics(const RobotMorphology& morph, const Vec3& p_body,
                                const Rotation3& r_body, const LegJoints& joints, Side side);

/// Body-frame offsets (from p_B) of the hip CoM, knee CoM and foot.
struct LegOffsets {
    Vec3 hip;
    Vec3 knee;
    Vec3 foot;
};
LegOffsets leg_offsets(const RobotMorphology& morph, const LegJoints& joints, Side side);

/// Rates of every frame on one leg.
///
/// ω_H^B = [γ̇,0,0] + ω_B^B is the hip rate written in body axes; the own-frame
/// rates ω_H^H and ω_K^K are what the hip/knee inertias act on.
struct FrameVelocities {
    Vec3 omega_hip_body;  // ω_H^B
    Vec3 omega_hip;       // ω_H^H
    Vec3 omega_knee_hip;  // ω_K^H
    Vec3 omega_knee;      // ω_K^K
    Vec3 pelvis;
    Vec3 hip;
    Vec3 knee;
    Vec3 foot;
    Vec3 thruster;
};
FrameVelocities frame_velocities(const RobotMorphology& morph, const FullState& state, Side side);

enum class Point { foot, thruster };

/// ∂ṗ/∂v for v = [ω_B^B; q̇]. Knee rates are not part of v; see FootKinematics
/// for the knee column.
PointJacobian position_jacobian(const RobotMorphology& morph, const FullState& state, Point point,
                                Side side);

/// Everything the dynamics needs about one mass-carrying frame.
struct MassFrame {
    double mass = 0.0;
    Mat3 inertia = Mat3::Zero();  // local frame
    Mat3 rotation = Mat3::Identity();  // local to inertial
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 omega = Vec3::Zero();  // own-frame angular velocity
    PointJacobian linear = PointJacobian::Zero();
    PointJacobian angular = PointJacobian::Zero();
    Vec3 linear_bias = Vec3::Zero();   // J̇ v (inertial)
    Vec3 angular_bias = Vec3::Zero();  // J̇_ω v (own frame)
};

/// Foot point quantities, including the knee's contribution.
struct FootKinematics {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();  // includes φ̇k
    PointJacobian jacobian = PointJacobian::Zero();
    Vec3 knee_column = Vec3::Zero();  // ∂ṗ_F/∂φ̇k
};

/// Frames in F = {B, H_L, K_L, H_R, K_R}.
using MassFrames = std::array<MassFrame, 5>;

MassFrames mass_frames(const RobotMorphology& morph, const FullState& state);
FootKinematics foot_kinematics(const RobotMorphology& morph, const FullState& state, Side side);

Vec3 center_of_mass(const RobotMorphology& morph, const FullState& state);
/// CoM Jacobian Σ m_i J_i / m.
PointJacobian com_jacobian(const RobotMorphology& morph, const FullState& state);

/// Body-frame ∂s_F/∂(γ, φh, φk) of the foot offset.
Mat3 leg_jacobian(const RobotMorphology& morph, const LegJoints& joints, Side side);

struct LegIkSolution {
    double frontal = 0.0;
    double sagittal = 0.0;
    double knee = 0.0;
    bool clamped = false;  // target was outside the workspace
};

/// Closed-form inverse of the foot chain for a body-frame foot offset.
/// Picks the downward-pointing frontal branch and the knee branch with
/// |φk| <= knee_limit; unreachable targets are clamped to the boundary.
LegIkSolution leg_inverse_kinematics(const RobotMorphology& morph, const Vec3& foot_in_body,
                                     Side side, double knee_limit = 1.4);

}  // namespace harpy::kinematics
