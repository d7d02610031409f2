#include "harpy/sim/tracking.hpp"

#include <cmath>

namespace harpy::sim {

namespace {

using math::Mat3;
using math::Rotation3;

void require_nonnegative(double v, const char* key)
{
    if (!(std::isfinite(v) && v >= 0.0)) {
        throw InvalidGains(key, "must be >= 0");
    }
}

int frontal_channel(Side s) { return kinematics::index(s); }
int sagittal_channel(Side s) { return 2 + kinematics::index(s); }
int knee_channel(Side s) { return 4 + kinematics::index(s); }

Vec3 solve_leg_rates(const Mat3& jac, const Vec3& foot_rate)
{
    const Eigen::FullPivLU<Mat3> lu(jac);
    if (!lu.isInvertible()) {
        return Vec3::Zero();
    }
    return lu.solve(foot_rate);
}

struct LegTarget {
    kinematics::LegIkSolution ik;
    Vec3 rates = Vec3::Zero();
};

LegTarget solve_leg(const RobotMorphology& morph, const Vec3& foot_in_body,
                    const Vec3& foot_rate_in_body, Side side)
{
    LegTarget t;
    t.ik = kinematics::leg_inverse_kinematics(morph, foot_in_body, side);
    const dynamics::LegJoints joints{t.ik.frontal, t.ik.sagittal, t.ik.knee, 0.0, 0.0, 0.0};
    t.rates = solve_leg_rates(kinematics::leg_jacobian(morph, joints, side), foot_rate_in_body);
    return t;
}

}  // namespace

void ControllerGains::validate() const
{
    require_nonnegative(stance_frontal_kp, "stance_frontal_kp");
    require_nonnegative(stance_frontal_kd, "stance_frontal_kd");
    require_nonnegative(stance_sagittal_kp, "stance_sagittal_kp");
    require_nonnegative(stance_sagittal_kd, "stance_sagittal_kd");
    require_nonnegative(swing_hip_kp, "swing_hip_kp");
    require_nonnegative(swing_hip_kd, "swing_hip_kd");
    require_nonnegative(knee_kp, "knee_kp");
    require_nonnegative(knee_kd, "knee_kd");
    require_nonnegative(attitude_kp, "attitude_kp");
    require_nonnegative(attitude_kd, "attitude_kd");
    require_nonnegative(stand_kp, "stand_kp");
    require_nonnegative(stand_kd, "stand_kd");
    require_nonnegative(stand_shift, "stand_shift");
    require_nonnegative(settle_time, "settle_time");
    if (!(std::isfinite(max_thrust) && max_thrust > 0.0)) {
        throw InvalidGains("max_thrust", "must be > 0");
    }
    if (!(std::isfinite(shift_duration) && shift_duration > 0.0)) {
        throw InvalidGains("shift_duration", "must be > 0");
    }
}

Vector6 joint_positions(const FullState& state)
{
    Vector6 q;
    q << state.hip_frontal, state.hip_sagittal, state.knee;
    return q;
}

Vector6 joint_rates(const FullState& state)
{
    Vector6 q;
    q << state.hip_frontal_rate, state.hip_sagittal_rate, state.knee_rate;
    return q;
}

ControlInput ServoCommand::evaluate(const FullState& state, double elapsed) const
{
    const Vector6 q = joint_positions(state);
    const Vector6 qd = joint_rates(state);
    ControlInput u;
    for (int i = 0; i < 6; ++i) {
        const JointSetpoint& s = joints[i];
        const double target = s.position + s.velocity * elapsed;
        u.joint[i] = s.feedforward + s.kp * (target - q[i]) + s.kd * (s.velocity - qd[i]);
    }
    u.thrust = thrust;
    return u;
}

ThrustAllocation allocate_thrust(const Vec3& lever_left, const Vec3& lever_right,
                                 const Vec3& force, const Vec3& torque, double max_thrust)
{
    const Vec3 mid = 0.5 * (lever_left + lever_right);
    const Vec3 axis = lever_left - lever_right;
    const Vec3 residual = torque - mid.cross(force);
    const Vec3 delta = residual.cross(axis) / axis.squaredNorm();

    ThrustAllocation a;
    Vec3 left = 0.5 * force + delta;
    Vec3 right = 0.5 * force - delta;
    for (Vec3* u : {&left, &right}) {
        const double n = u->norm();
        if (n > max_thrust) {
            *u *= max_thrust / n;
            a.saturated = true;
        }
    }
    a.forces << left, right;
    return a;
}

TrackingOutput whole_body_tracking(const RobotMorphology& morph, const FullState& state,
                                   const TrackingRequest& request, const ControllerGains& gains)
{
    TrackingOutput out;
    const Mat3 r = state.rotation.matrix();
    const Vec3 com = kinematics::center_of_mass(morph, state);
    const Vec3 com_velocity = kinematics::com_jacobian(morph, state) * state.v();

    // Body target: actual xy at the CoM height target; stand mode shifts it
    // laterally.
    Vec3 body = state.position;
    Vec3 body_rate = state.velocity;
    body.z() = request.z0 + (state.position.z() - com.z());
    body_rate.z() = 0.0;
    if (request.mode == TrackingMode::stand) {
        body.y() += request.com_reference.y() - com.y();
        body_rate.y() = request.com_reference_rate.y();
    }

    const bool walking = request.mode == TrackingMode::walk;
    const dynamics::Acceleration bias =
        walking ? dynamics::bias_vector(morph, state) : dynamics::Acceleration::Zero();

    // Stance feet sit at the depth where the contact springs carry m g'.
    const double mass = morph.total_mass();
    const double g_eff = morph.gravity - request.vertical_thrust / mass;
    const double depth = mass * g_eff / ((walking ? 1.0 : 2.0) * request.ground_stiffness);

    for (Side side : {Side::left, Side::right}) {
        const bool swing = walking && side != request.stance;
        LegTarget target;
        if (swing) {
            const Vec3 s = r.transpose() * (request.swing.position - state.position);
            const Vec3 s_rate = r.transpose() * (request.swing.velocity - state.velocity) -
                                state.body_rate.cross(s);
            target = solve_leg(morph, s, s_rate, side);
        } else {
            Vec3 foot = kinematics::foot_kinematics(morph, state, side).position;
            if (const auto& anchor = request.foot_anchor[kinematics::index(side)]) {
                foot.head<2>() = *anchor;
            }
            foot.z() = -depth;
            if (walking) {
                target = solve_leg(morph, foot - body, -body_rate, side);
            } else {
                const Vec3 s = r.transpose() * (foot - body);
                target = solve_leg(morph, s, -r.transpose() * body_rate - state.body_rate.cross(s),
                                   side);
            }
        }
        out.ik_clamped = out.ik_clamped || target.ik.clamped;

        JointSetpoint& frontal = out.command.joints[frontal_channel(side)];
        JointSetpoint& sagittal = out.command.joints[sagittal_channel(side)];
        JointSetpoint& knee = out.command.joints[knee_channel(side)];
        if (swing) {
            frontal = {target.ik.frontal, target.rates[0], gains.swing_hip_kp, gains.swing_hip_kd,
                       bias[dynamics::hip_frontal_index(side)]};
            sagittal = {target.ik.sagittal, target.rates[1], gains.swing_hip_kp, gains.swing_hip_kd,
                        bias[dynamics::hip_sagittal_index(side)]};
        } else {
            frontal = {target.ik.frontal, target.rates[0], gains.stance_frontal_kp,
                       gains.stance_frontal_kd, 0.0};
            sagittal = {target.ik.sagittal, target.rates[1], gains.stance_sagittal_kp,
                        gains.stance_sagittal_kd, 0.0};
        }
        knee = {target.ik.knee, target.rates[2], gains.knee_kp, gains.knee_kd, 0.0};
    }

    // Thrusters: vertical support, roll/yaw attitude PD, stand-mode sagittal hold.
    Vec3 force(0.0, 0.0, request.vertical_thrust);
    if (request.mode == TrackingMode::stand) {
        force.x() = mass * (gains.stand_kp * (request.com_reference.x() - com.x()) +
                            gains.stand_kd * (request.com_reference_rate.x() - com_velocity.x()));
    }
    const Vec3 attitude_error = 0.5 * math::vee(r - r.transpose());
    const Vec3 torque_body = -gains.attitude_kp * attitude_error - gains.attitude_kd * state.body_rate;
    out.attitude_torque = r * torque_body;

    const Vec3 lever_left = state.position + r * kinematics::sided(morph.lt_body, Side::left) - com;
    const Vec3 lever_right = state.position + r * kinematics::sided(morph.lt_body, Side::right) - com;
    const ThrustAllocation alloc =
        allocate_thrust(lever_left, lever_right, force, out.attitude_torque, gains.max_thrust);
    out.command.thrust = alloc.forces;
    out.thrust_saturated = alloc.saturated;

    out.input = out.command.evaluate(state);
    return out;
}

}  // namespace harpy::sim
