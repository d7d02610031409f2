#include "harpy/contact/ground.hpp"

#include <algorithm>
#include <cmath>

namespace harpy::contact {

namespace {

double sgn(double v)
{
    return static_cast<double>((v > 0.0) - (v < 0.0));
}

void require(bool ok, const char* key, const char* what)
{
    if (!ok) {
        throw InvalidGroundParams(key, what);
    }
}

}  // namespace

void GroundModelParams::validate() const
{
    require(std::isfinite(k_gp) && k_gp > 0.0, "k_gp", "must be > 0");
    require(std::isfinite(k_gd) && k_gd >= 0.0, "k_gd", "must be >= 0");
    require(std::isfinite(mu_c) && mu_c >= 0.0, "mu_c", "must be >= 0");
    require(std::isfinite(mu_s) && mu_s >= mu_c, "mu_s", "Stribeck law needs mu_s >= mu_c");
    require(std::isfinite(mu_v) && mu_v >= 0.0, "mu_v", "must be >= 0");
    require(std::isfinite(v_s) && v_s > 0.0, "v_s", "must be > 0");
}

double normal_force(const GroundModelParams& p, double z, double z_dot)
{
    if (z >= 0.0) {
        return 0.0;
    }
    const double damping = z_dot > 0.0 ? 0.0 : p.k_gd;
    return std::max(0.0, -p.k_gp * z - damping * z_dot);
}

Eigen::Vector2d friction_force(const GroundModelParams& p, const Eigen::Vector2d& velocity,
                               double f_z)
{
    Eigen::Vector2d f;
    for (int i = 0; i < 2; ++i) {
        const double v = velocity[i];
        const double mu = p.mu_c + (p.mu_s - p.mu_c) * std::exp(-(v * v) / (p.v_s * p.v_s));
        f[i] = -mu * f_z * sgn(v) - p.mu_v * v;
    }
    return f;
}

ContactForce foot_contact(const GroundModelParams& p, const Vec3& position, const Vec3& velocity)
{
    ContactForce c;
    if (position.z() >= 0.0) {
        return c;
    }
    c.in_contact = true;
    c.penetration = -position.z();
    const double f_z = normal_force(p, position.z(), velocity.z());
    c.force.head<2>() = friction_force(p, velocity.head<2>(), f_z);
    c.force.z() = f_z;
    return c;
}

Vector6 ground_forces(const GroundModelParams& p, const FootState& left, const FootState& right)
{
    Vector6 u;
    u.head<3>() = foot_contact(p, left.position, left.velocity).force;
    u.tail<3>() = foot_contact(p, right.position, right.velocity).force;
    return u;
}

}  // namespace harpy::contact
