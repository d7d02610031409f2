#include "harpy/vlip/capture.hpp"

#include <algorithm>
#include <cmath>

namespace harpy::vlip {

namespace {

void require(bool ok, const char* key, const char* what)
{
    if (!ok) {
        throw InvalidGaitConfig(key, what);
    }
}

double clamp_flag(double v, double limit, bool& clamped)
{
    if (v > limit) {
        clamped = true;
        return limit;
    }
    if (v < -limit) {
        clamped = true;
        return -limit;
    }
    return v;
}

}  // namespace

void GaitConfig::validate() const
{
    require(std::isfinite(z0) && z0 > 0.0, "z0", "must be > 0");
    require(std::isfinite(step_period) && step_period > 0.0, "step_period", "must be > 0");
    require(std::isfinite(step_width) && step_width >= 0.0, "step_width", "must be >= 0");
    require(std::isfinite(desired_speed), "desired_speed", "must be finite");
    require(std::isfinite(max_step_length) && max_step_length > 0.0, "max_step_length",
            "must be > 0");
    require(std::isfinite(max_step_width) && max_step_width > 0.0, "max_step_width", "must be > 0");
    require(std::isfinite(min_foot_separation) && min_foot_separation >= 0.0 &&
                min_foot_separation <= max_step_width,
            "min_foot_separation", "must lie in [0, max_step_width]");
    require(std::isfinite(thrust_fraction) && thrust_fraction >= 0.0 && thrust_fraction < 1.0,
            "thrust_fraction", "must lie in [0, 1) so that g' = g - |u_tc|/m stays > 0");
    require(std::isfinite(max_thrust_fraction) && max_thrust_fraction >= 0.0 &&
                max_thrust_fraction < 1.0,
            "max_thrust_fraction", "must lie in [0, 1) so that g' > 0");
    require(std::isfinite(early_step_energy) && early_step_energy > 0.0, "early_step_energy",
            "must be > 0");
    require(std::isfinite(min_stance_time) && min_stance_time >= 0.0 &&
                min_stance_time <= step_period,
            "min_stance_time", "must lie in [0, step_period]");
    require(std::isfinite(airborne_grace) && airborne_grace >= 0.0, "airborne_grace",
            "must be >= 0");
    require(std::isfinite(apex_height) && apex_height >= 0.0, "apex_height", "must be >= 0");
    require(std::isfinite(touchdown_depth) && touchdown_depth >= 0.0, "touchdown_depth",
            "must be >= 0");
}

double GaitConfig::commanded_thrust(double mass, double gravity) const
{
    return std::min(thrust_fraction, max_thrust_fraction) * mass * gravity;
}

CapturePlan plan_step(const VlipState& state, const ThrustCommand& thrust, const GaitConfig& gait,
                      Side swing, double time_in_stance)
{
    CapturePlan plan;
    plan.swing = swing;
    plan.stance = kinematics::other(swing);
    plan.step_period = gait.step_period;
    plan.g_eff = effective_gravity(state.mass, thrust.force.z(), state.gravity);
    plan.omega = std::sqrt(plan.g_eff / state.z0);

    const double w = plan.omega;
    const double growth = std::exp(w * gait.step_period);
    const Vec3 rel = state.position - state.cop;

    plan.sagittal.capture_offset = state.velocity.x() / w;
    plan.sagittal.bias = -gait.desired_speed * gait.step_period / (growth - 1.0);
    plan.sagittal.energy =
        orbital_energy(rel.x(), state.velocity.x(), state.z0, plan.g_eff, Plane::sagittal).energy;
    plan.sagittal.step = clamp_flag(plan.sagittal.capture_offset + plan.sagittal.bias,
                                    gait.max_step_length, plan.sagittal.clamped);

    const double side_sign = kinematics::mirror_sign(swing);
    plan.frontal.capture_offset = state.velocity.y() / w;
    plan.frontal.bias = side_sign * gait.step_width / (1.0 + growth);
    plan.frontal.energy =
        orbital_energy(rel.y(), state.velocity.y(), state.z0, plan.g_eff, Plane::frontal).energy;
    plan.frontal.step = clamp_flag(plan.frontal.capture_offset + plan.frontal.bias,
                                   gait.max_step_width, plan.frontal.clamped);

    // Keep the swing foot on its own side of the stance foot.
    const double gap = side_sign * (state.position.y() + plan.frontal.step - state.cop.y());
    if (gap < gait.min_foot_separation) {
        plan.frontal.step += side_sign * (gait.min_foot_separation - gap);
        plan.frontal.clamped = true;
    }

    plan.target = Vec3(state.position.x() + plan.sagittal.step,
                       state.position.y() + plan.frontal.step, 0.0);
    plan.clamped = plan.sagittal.clamped || plan.frontal.clamped;

    const bool timer = time_in_stance >= gait.step_period - 1e-9;
    const bool energetic = std::max(plan.sagittal.energy, plan.frontal.energy) >
                               gait.early_step_energy &&
                           time_in_stance >= gait.min_stance_time - 1e-9;
    plan.step_due = timer || energetic;
    plan.early = energetic && !timer;
    return plan;
}

double capturable_push_speed(double omega, double step_period, double max_step)
{
    const double half = 0.5 * omega * step_period;
    return omega * max_step / std::tanh(half) / std::cosh(omega * step_period);
}

}  // namespace harpy::vlip
