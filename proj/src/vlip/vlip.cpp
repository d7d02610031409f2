#include "harpy/vlip/vlip.hpp"

#include <cmath>
#include <string>

namespace harpy::vlip {

ThrustCommand ThrustCommand::vertical(double magnitude)
{
    return ThrustCommand{Vec3(0.0, 0.0, magnitude)};
}

ThrustCommand ThrustCommand::sagittal_tilt(double magnitude, double theta)
{
    return ThrustCommand{Vec3(magnitude * std::sin(theta), 0.0, magnitude * std::cos(theta))};
}

double ThrustCommand::sagittal_tilt_angle() const
{
    return std::atan2(force.x(), force.z());
}

double ThrustCommand::frontal_tilt_angle() const
{
    return std::atan2(force.y(), force.z());
}

VlipAcceleration vlip_dynamics(const VlipState& state, double u_r, const ThrustCommand& thrust)
{
    const Vec3 r = state.leg();
    const double r2 = r.squaredNorm();
    if (!(r2 > 0.0)) {
        throw std::domain_error("degenerate pendulum: |r| = 0");
    }
    const Vec3 g(0.0, 0.0, -state.gravity);
    const double m = state.mass;

    VlipAcceleration out;
    out.lambda = (m * u_r - r.dot(m * g + thrust.force)) / r2;
    out.leg_force = r * out.lambda;
    out.acceleration = g + (thrust.force + out.leg_force) / m;
    out.feasible = out.lambda >= 0.0;
    return out;
}

double height_hold_input(const VlipState& state, const ThrustCommand& thrust)
{
    const Vec3 r = state.leg();
    if (!(r.z() > 0.0)) {
        throw std::domain_error("height hold needs the CoM above the CoP");
    }
    const double m = state.mass;
    const double lambda = (m * state.gravity - thrust.force.z()) / r.z();
    const Vec3 accel = Vec3(0.0, 0.0, -state.gravity) + (thrust.force + r * lambda) / m;
    return r.dot(accel);
}

double effective_gravity(double mass, double vertical_thrust, double gravity)
{
    const double g_eff = gravity - vertical_thrust / mass;
    if (!(g_eff > 0.0)) {
        throw InvalidThrust("thrust " + std::to_string(vertical_thrust) +
                            " N leaves no effective gravity (needs g' > 0, thrust < m g)");
    }
    return g_eff;
}

namespace {

PlanarState project(const VlipState& state, const ThrustCommand& thrust, Plane plane)
{
    const int axis = plane == Plane::sagittal ? 0 : 1;
    const double m = state.mass;
    const double u_h = thrust.force[axis];
    const double u_v = thrust.force.z();
    if (u_v >= m * state.gravity) {
        throw InvalidThrust("vertical thrust component reaches m g; g' must stay positive");
    }

    PlanarState p;
    p.plane = plane;
    p.x = state.position[axis] - state.cop[axis];
    p.x_dot = state.velocity[axis];
    p.z0 = state.z0;
    p.thrust = std::hypot(u_h, u_v);
    p.theta_thrust = std::atan2(u_h, u_v);
    const double r = std::hypot(p.x, p.z0);
    p.theta_leg = std::atan2(p.x, p.z0);
    p.lambda = (m * state.gravity - p.thrust * std::cos(p.theta_thrust)) * r / p.z0;
    p.x_ddot = (p.lambda * std::sin(p.theta_leg) + p.thrust * std::sin(p.theta_thrust)) / m;
    return p;
}

}  // namespace

PlanarState sagittal_projection(const VlipState& state, const ThrustCommand& thrust)
{
    return project(state, thrust, Plane::sagittal);
}

PlanarState frontal_projection(const VlipState& state, const ThrustCommand& thrust)
{
    return project(state, thrust, Plane::frontal);
}

const char* to_string(EnergyClass c)
{
    switch (c) {
    case EnergyClass::pass_over:
        return "pass-over";
    case EnergyClass::reverse:
        return "reverse";
    case EnergyClass::rest:
        break;
    }
    return "rest";
}

OrbitalEnergy orbital_energy(double x, double x_dot, double z0, double g_eff, Plane plane,
                             double rest_tol)
{
    if (!(z0 > 0.0) || !(g_eff > 0.0)) {
        throw std::domain_error("orbital energy needs z0 > 0 and g' > 0");
    }
    OrbitalEnergy e;
    e.plane = plane;
    e.energy = 0.5 * x_dot * x_dot - 0.5 * g_eff * x * x / z0;
    if (std::abs(e.energy) <= rest_tol) {
        e.classification = EnergyClass::rest;
    } else {
        e.classification = e.energy > 0.0 ? EnergyClass::pass_over : EnergyClass::reverse;
    }
    return e;
}

double capture_point(double x_dot, double z0, double mass, double thrust, double gravity)
{
    const double g_eff = effective_gravity(mass, thrust, gravity);
    return x_dot * std::sqrt(z0 / g_eff);
}

LipPrediction predict_lip(const Eigen::Vector2d& position, const Eigen::Vector2d& velocity,
                          double omega, double horizon, const Eigen::Vector2d& accel)
{
    // ẍ = ω² x + a  →  shift by the equilibrium −a/ω².
    const Eigen::Vector2d offset = accel / (omega * omega);
    const double c = std::cosh(omega * horizon);
    const double s = std::sinh(omega * horizon);
    LipPrediction p;
    p.position = (position + offset) * c + velocity * (s / omega) - offset;
    p.velocity = (position + offset) * (omega * s) + velocity * c;
    return p;
}

}  // namespace harpy::vlip
