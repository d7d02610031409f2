#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "harpy/dynamics/dynamics.hpp"
#include "harpy/kinematics/morphology.hpp"

namespace harpy::contact {

using dynamics::Vector6;
using math::Vec3;

class InvalidGroundParams : public std::invalid_argument {
public:
    InvalidGroundParams(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Flat ground at z = 0 with a one-sided spring-damper and Stribeck friction.
struct GroundModelParams {
    double k_gp = 8000.0;  // N/m
    double k_gd = 300.0;   // N·s/m, applied only while compressing
    double mu_c = 0.7;     // Coulomb
    double mu_s = 0.9;     // static
    double mu_v = 0.1;     // viscous, N·s/m
    double v_s = 0.01;     // Stribeck velocity, m/s

    void validate() const;
};

/// Normal force for foot height z and vertical velocity z_dot.
/// Zero above ground; no damping while rebounding; never negative.
double normal_force(const GroundModelParams& p, double z, double z_dot);

/// Tangential force opposing the sliding velocity (x, y), for normal load f_z.
///   f = -(μc + (μs − μc) exp(−v²/vs²)) f_z sgn(v) − μv v, applied per axis.
/// sgn(0) = 0, so a foot at rest feels no friction.
Eigen::Vector2d friction_force(const GroundModelParams& p, const Eigen::Vector2d& velocity,
                               double f_z);

struct ContactForce {
    Vec3 force = Vec3::Zero();
    bool in_contact = false;
    double penetration = 0.0;  // m, ≥ 0
};

ContactForce foot_contact(const GroundModelParams& p, const Vec3& position, const Vec3& velocity);

struct FootState {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
};

/// [u_gL; u_gR], each gated by H(−p_F,z).
Vector6 ground_forces(const GroundModelParams& p, const FootState& left, const FootState& right);

}  // namespace harpy::contact
