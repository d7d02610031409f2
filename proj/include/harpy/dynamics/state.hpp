#pragma once

#include <Eigen/Dense>

#include "harpy/kinematics/morphology.hpp"
#include "harpy/math/rotation.hpp"

namespace harpy::dynamics {

using kinematics::Side;
using math::Rotation3;
using math::Vec3;

inline constexpr int kStateDim = 30;     // 9 + 7 + 2 + 3 + 7 + 2
inline constexpr int kVelocityDim = 10;  // v = [ω_B^B; q̇]
inline constexpr int kAccelDim = 12;     // a = [ω̇_B^B; q̈; φ̈_kL; φ̈_kR]

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using Velocity = Eigen::Matrix<double, kVelocityDim, 1>;
using Acceleration = Eigen::Matrix<double, kAccelDim, 1>;
using Coordinates = Eigen::Matrix<double, 7, 1>;

// Column indices into v (and the first ten entries of a).
inline constexpr int kOmegaIndex = 0;
inline constexpr int kBodyVelIndex = 3;
inline constexpr int hip_frontal_index(Side s) { return 6 + kinematics::index(s); }
inline constexpr int hip_sagittal_index(Side s) { return 8 + kinematics::index(s); }
inline constexpr int knee_accel_index(Side s) { return 10 + kinematics::index(s); }

/// Joint angles and rates of one leg.
struct LegJoints {
    double frontal = 0.0;   // γ_h
    double sagittal = 0.0;  // φ_h
    double knee = 0.0;      // φ_k
    double frontal_rate = 0.0;
    double sagittal_rate = 0.0;
    double knee_rate = 0.0;
};

/// Full-order state x = [r_B; q; φ_kL; φ_kR; ω_B^B; q̇; φ̇_kL; φ̇_kR] with
/// q = [p_B; γ_hL; γ_hR; φ_hL; φ_hR].
struct FullState {
    Rotation3 rotation;
    Vec3 position = Vec3::Zero();
    Eigen::Vector2d hip_frontal = Eigen::Vector2d::Zero();
    Eigen::Vector2d hip_sagittal = Eigen::Vector2d::Zero();
    Eigen::Vector2d knee = Eigen::Vector2d::Zero();
    Vec3 body_rate = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Eigen::Vector2d hip_frontal_rate = Eigen::Vector2d::Zero();
    Eigen::Vector2d hip_sagittal_rate = Eigen::Vector2d::Zero();
    Eigen::Vector2d knee_rate = Eigen::Vector2d::Zero();

    LegJoints leg(Side s) const;
    void set_leg(Side s, const LegJoints& j);

    Coordinates q() const;
    Velocity v() const;
    void set_v(const Velocity& v);

    /// Row-major r_B first, then the remaining entries in x order.
    StateVector to_vector() const;
    /// Validates the rotation block (throws math::NotARotation).
    static FullState from_vector(const StateVector& x, double rotation_tol = 1e-6);

    bool all_finite() const;
};

}  // namespace harpy::dynamics
