#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "harpy/math/rotation.hpp"

namespace harpy::vlip {

using math::Vec3;

/// Raised when the thrust leaves the model's validity regime (g' <= 0).
class InvalidThrust : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Point-mass pendulum state on a point CoP.
struct VlipState {
    Vec3 position = Vec3::Zero();  // p_B (CoM)
    Vec3 velocity = Vec3::Zero();
    Vec3 cop = Vec3::Zero();  // c
    double z0 = 0.4;          // height constraint
    double mass = 4.6;
    double gravity = 9.81;

    /// r = p_B − c
    Vec3 leg() const { return position - cop; }
};

/// Net thruster force acting at the CoM, inertial frame.
struct ThrustCommand {
    Vec3 force = Vec3::Zero();

    /// Vertical thrust of the given magnitude.
    static ThrustCommand vertical(double magnitude);
    /// Thrust of the given magnitude tilted by theta in the x–z plane.
    static ThrustCommand sagittal_tilt(double magnitude, double theta);

    double magnitude() const { return force.norm(); }
    /// θ_T in the x–z plane (positive tilts thrust toward +x).
    double sagittal_tilt_angle() const;
    double frontal_tilt_angle() const;
};

struct VlipAcceleration {
    Vec3 acceleration = Vec3::Zero();
    double lambda = 0.0;           // constraint multiplier
    Vec3 leg_force = Vec3::Zero(); // J_sᵀ λ = r λ
    bool feasible = true;          // false when the leg would have to pull
};

/// m p̈ = m g + u_tc + r λ with the leg constraint rᵀ p̈ = u_r (no slip).
/// An infeasible (pulling) λ is returned as-is with feasible = false.
VlipAcceleration vlip_dynamics(const VlipState& state, double u_r, const ThrustCommand& thrust);

/// u_r that keeps p̈_z = 0 (linear-pendulum mode).
double height_hold_input(const VlipState& state, const ThrustCommand& thrust);

/// g' = g − u / m. Throws InvalidThrust when g' <= 0.
double effective_gravity(double mass, double vertical_thrust, double gravity);

enum class Plane { sagittal, frontal };

/// Height-constrained planar pendulum, x measured from the CoP.
struct PlanarState {
    Plane plane = Plane::sagittal;
    double x = 0.0;
    double x_dot = 0.0;
    double z0 = 0.0;
    double theta_leg = 0.0;     // θ_L
    double theta_thrust = 0.0;  // θ_T
    double thrust = 0.0;        // in-plane thrust magnitude
    double lambda = 0.0;        // |λ|, leg force magnitude
    double x_ddot = 0.0;
};

/// |λ| = (mg − |u| cos θ_T) r / z0 and m ẍ = |λ| sin θ_L + |u| sin θ_T.
/// Throws InvalidThrust when |u| cos θ_T >= m g.
PlanarState sagittal_projection(const VlipState& state, const ThrustCommand& thrust);
PlanarState frontal_projection(const VlipState& state, const ThrustCommand& thrust);

enum class EnergyClass { pass_over, reverse, rest };
const char* to_string(EnergyClass c);

struct OrbitalEnergy {
    double energy = 0.0;  // m²/s²
    Plane plane = Plane::sagittal;
    EnergyClass classification = EnergyClass::rest;
};

inline constexpr double kOrbitalRestTol = 1e-12;

/// E = ½ẋ² − ½ g' x² / z0.
OrbitalEnergy orbital_energy(double x, double x_dot, double z0, double g_eff,
                             Plane plane = Plane::sagittal, double rest_tol = kOrbitalRestTol);

/// x_cp = ẋ √(z0 / (g − thrust/m)). Throws InvalidThrust when thrust >= m g.
double capture_point(double x_dot, double z0, double mass, double thrust, double gravity);

/// Closed-form linear-pendulum propagation about a fixed CoP with constant
/// vertical thrust (and optional horizontal thrust acceleration).
struct LipPrediction {
    Eigen::Vector2d position;  // relative to the CoP
    Eigen::Vector2d velocity;
};
LipPrediction predict_lip(const Eigen::Vector2d& position, const Eigen::Vector2d& velocity,
                          double omega, double horizon,
                          const Eigen::Vector2d& accel = Eigen::Vector2d::Zero());

}  // namespace harpy::vlip
