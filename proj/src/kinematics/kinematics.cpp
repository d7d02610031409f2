#include "harpy/kinematics/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "harpy/kinematics/taylor.hpp"

namespace harpy::kinematics {

namespace {

using math::skew;

template <class S>
struct V3 {
    S x, y, z;
};

template <class S>
V3<S> lift(const Vec3& v)
{
    return {S(v.x()), S(v.y()), S(v.z())};
}

template <class S>
V3<S> operator+(const V3<S>& a, const V3<S>& b)
{
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

// R_x(angle) v given cos/sin of the angle.
template <class S>
V3<S> apply_rx(const S& c, const S& s, const V3<S>& v)
{
    return {v.x, c * v.y - s * v.z, s * v.y + c * v.z};
}

template <class S>
V3<S> apply_ry(const S& c, const S& s, const V3<S>& v)
{
    return {c * v.x + s * v.z, v.y, c * v.z - s * v.x};
}

template <class S>
struct Chain {
    V3<S> hip, knee, foot;
};

// Body-frame offsets from p_B:
//   hip  = l1 + Rx(σγ) l2
//   knee = hip + Rx(σγ) Ry(φh) l3
//   foot = knee + Rx(σγ) Ry(φh) Ry(φk) l4(φk)
template <class S>
Chain<S> chain(const RobotMorphology& m, Side side, const S& gamma, const S& phi_h, const S& phi_k)
{
    using std::cos;
    using std::sin;
    const S frontal = gamma * S(mirror_sign(side));
    const S cg = cos(frontal), sg = sin(frontal);
    const S ch = cos(phi_h), sh = sin(phi_h);
    const S ck = cos(phi_k), sk = sin(phi_k);

    const V3<S> l4{S(-m.l4a) * ck, S(0.0), -(S(m.l4b) + S(m.l4a) * sk)};
    const V3<S> lower = apply_ry(ck, sk, l4);
    const V3<S> thigh = apply_ry(ch, sh, lift<S>(sided(m.l3_hip, side)));
    const V3<S> shank = apply_ry(ch, sh, lower);

    Chain<S> out;
    out.hip = lift<S>(sided(m.l1_body, side)) + apply_rx(cg, sg, lift<S>(sided(m.l2_pelvis, side)));
    out.knee = out.hip + apply_rx(cg, sg, thigh);
    out.foot = out.knee + apply_rx(cg, sg, shank);
    return out;
}

Vec3 value(const V3<double>& v) { return {v.x, v.y, v.z}; }
Vec3 value(const V3<Jet>& v) { return {v.x.v, v.y.v, v.z.v}; }
Vec3 first(const V3<Jet>& v) { return {v.x.first_derivative(), v.y.first_derivative(), v.z.first_derivative()}; }
Vec3 second(const V3<Jet>& v)
{
    return {v.x.second_derivative(), v.y.second_derivative(), v.z.second_derivative()};
}

// Offsets, their time derivative along the current joint rates, the
// velocity-product second derivative, and the three joint partials.
struct LegDerivatives {
    std::array<Vec3, 3> s;       // hip, knee, foot
    std::array<Vec3, 3> s_dot;   // including knee rate
    std::array<Vec3, 3> s_ddot;  // velocity-product part
    // partial[j][k]: d s_k / d joint_j, joint order (γ, φh, φk)
    std::array<std::array<Vec3, 3>, 3> partial;
};

LegDerivatives leg_derivatives(const RobotMorphology& m, const LegJoints& j, Side side)
{
    LegDerivatives out;
    {
        const auto c = chain(m, side, Jet(j.frontal, j.frontal_rate, 0.0),
                             Jet(j.sagittal, j.sagittal_rate, 0.0), Jet(j.knee, j.knee_rate, 0.0));
        const std::array<const V3<Jet>*, 3> pts{&c.hip, &c.knee, &c.foot};
        for (int k = 0; k < 3; ++k) {
            out.s[k] = value(*pts[k]);
            out.s_dot[k] = first(*pts[k]);
            out.s_ddot[k] = second(*pts[k]);
        }
    }
    const std::array<double, 3> angles{j.frontal, j.sagittal, j.knee};
    for (int joint = 0; joint < 3; ++joint) {
        std::array<Jet, 3> seeds{Jet(angles[0]), Jet(angles[1]), Jet(angles[2])};
        seeds[joint].d1 = 1.0;
        const auto c = chain(m, side, seeds[0], seeds[1], seeds[2]);
        out.partial[joint] = {first(c.hip), first(c.knee), first(c.foot)};
    }
    return out;
}

void check_inputs(const Rotation3& r, const LegJoints& joints)
{
    if (r.orthonormality_error() > 1e-6) {
        throw KinematicsError("body rotation is not orthonormal");
    }
    if (!(std::abs(joints.knee) < kKneeLimit)) {
        throw KinematicsError("knee angle outside (-pi/2, pi/2)");
    }
}

double wrap_angle(double a)
{
    return std::remainder(a, 2.0 * std::numbers::pi);
}

PointJacobian point_jacobian(const Rotation3& r, const Vec3& offset, const Vec3& d_gamma,
                             const Vec3& d_phi_h, Side side)
{
    PointJacobian jac = PointJacobian::Zero();
    jac.block<3, 3>(0, dynamics::kOmegaIndex) = -r.matrix() * skew(offset);
    jac.block<3, 3>(0, dynamics::kBodyVelIndex).setIdentity();
    jac.col(dynamics::hip_frontal_index(side)) = r * d_gamma;
    jac.col(dynamics::hip_sagittal_index(side)) = r * d_phi_h;
    return jac;
}

}  // namespace

LegOffsets leg_offsets(const RobotMorphology& morph, const LegJoints& joints, Side side)
{
    const auto c = chain<double>(morph, side, joints.frontal, joints.sagittal, joints.knee);
    return {value(c.hip), value(c.knee), value(c.foot)};
}

LegPositions forward_kinematics(const RobotMorphology& morph, const Vec3& p_body,
                                const Rotation3& r_body, const LegJoints& joints, Side side)
{
    check_inputs(r_body, joints);
    const LegOffsets o = leg_offsets(morph, joints, side);
    LegPositions out;
    out.pelvis = p_body + r_body * sided(morph.l1_body, side);
    out.hip = p_body + r_body * o.hip;
    out.knee = p_body + r_body * o.knee;
    out.foot = p_body + r_body * o.foot;
    out.thruster = p_body + r_body * sided(morph.lt_body, side);
    return out;
}

FrameVelocities frame_velocities(const RobotMorphology& morph, const FullState& state, Side side)
{
    const LegJoints j = state.leg(side);
    const double sigma = mirror_sign(side);
    const Vec3& w = state.body_rate;
    const Rotation3& r = state.rotation;

    FrameVelocities out;
    out.omega_hip_body = Vec3(sigma * j.frontal_rate, 0.0, 0.0) + w;
    out.omega_hip = math::rot_x(sigma * j.frontal).transpose() * out.omega_hip_body;
    out.omega_knee_hip = Vec3(0.0, j.sagittal_rate, 0.0) + out.omega_hip;
    out.omega_knee = math::rot_y(j.sagittal).transpose() * out.omega_knee_hip;

    const LegDerivatives d = leg_derivatives(morph, j, side);
    auto point_velocity = [&](const Vec3& s, const Vec3& s_dot) {
        return Vec3(state.velocity + r * (w.cross(s) + s_dot));
    };
    out.pelvis = point_velocity(sided(morph.l1_body, side), Vec3::Zero());
    out.hip = point_velocity(d.s[0], d.s_dot[0]);
    out.knee = point_velocity(d.s[1], d.s_dot[1]);
    out.foot = point_velocity(d.s[2], d.s_dot[2]);
    out.thruster = point_velocity(sided(morph.lt_body, side), Vec3::Zero());
    return out;
}

PointJacobian position_jacobian(const RobotMorphology& morph, const FullState& state, Point point,
                                Side side)
{
    if (point == Point::thruster) {
        return point_jacobian(state.rotation, sided(morph.lt_body, side), Vec3::Zero(), Vec3::Zero(),
                              side);
    }
    return foot_kinematics(morph, state, side).jacobian;
}

FootKinematics foot_kinematics(const RobotMorphology& morph, const FullState& state, Side side)
{
    const LegDerivatives d = leg_derivatives(morph, state.leg(side), side);
    const Rotation3& r = state.rotation;
    FootKinematics out;
    out.position = state.position + r * d.s[2];
    out.velocity = state.velocity + r * (state.body_rate.cross(d.s[2]) + d.s_dot[2]);
    out.jacobian = point_jacobian(r, d.s[2], d.partial[0][2], d.partial[1][2], side);
    out.knee_column = r * d.partial[2][2];
    return out;
}

MassFrames mass_frames(const RobotMorphology& morph, const FullState& state)
{
    MassFrames frames;
    const Rotation3& r = state.rotation;
    const Vec3& w = state.body_rate;

    MassFrame& body = frames[0];
    body.mass = morph.m_body;
    body.inertia = morph.inertia_body;
    body.position = state.position;
    body.velocity = state.velocity;
    body.omega = w;
    body.rotation = r.matrix();
    body.linear.block<3, 3>(0, dynamics::kBodyVelIndex).setIdentity();
    body.angular.block<3, 3>(0, dynamics::kOmegaIndex).setIdentity();

    for (Side side : {Side::left, Side::right}) {
        const LegJoints j = state.leg(side);
        const LegDerivatives d = leg_derivatives(morph, j, side);
        const double sigma = mirror_sign(side);
        const Mat3 rx_t = math::rot_x(sigma * j.frontal).transpose();
        const Mat3 ry_t = math::rot_y(j.sagittal).transpose();
        const Vec3 frontal_axis(sigma, 0.0, 0.0);  // σ e_x
        const Vec3 sagittal_axis = Vec3::UnitY();

        MassFrame& hip = frames[1 + 2 * index(side)];
        MassFrame& knee = frames[2 + 2 * index(side)];

        for (int k = 0; k < 2; ++k) {
            MassFrame& f = k == 0 ? hip : knee;
            const Vec3& s = d.s[k];
            const Vec3& s_dot = d.s_dot[k];
            f.position = state.position + r * s;
            f.velocity = state.velocity + r * (w.cross(s) + s_dot);
            f.linear = point_jacobian(r, s, d.partial[0][k], d.partial[1][k], side);
            f.linear_bias = r * (w.cross(w.cross(s)) + 2.0 * w.cross(s_dot) + d.s_ddot[k]);
        }

        hip.mass = morph.m_hip;
        hip.inertia = sided_inertia(morph.inertia_hip, side);
        hip.rotation = r.matrix() * rx_t.transpose();
        hip.omega = rx_t * (w + j.frontal_rate * frontal_axis);
        hip.angular.block<3, 3>(0, dynamics::kOmegaIndex) = rx_t;
        hip.angular.col(dynamics::hip_frontal_index(side)) = frontal_axis;
        hip.angular_bias = hip.omega.cross(j.frontal_rate * frontal_axis);

        knee.mass = morph.m_knee;
        knee.inertia = sided_inertia(morph.inertia_knee, side);
        knee.rotation = hip.rotation * ry_t.transpose();
        knee.omega = ry_t * (hip.omega + j.sagittal_rate * sagittal_axis);
        knee.angular.block<3, 3>(0, dynamics::kOmegaIndex) = ry_t * rx_t;
        knee.angular.col(dynamics::hip_frontal_index(side)) = ry_t * frontal_axis;
        knee.angular.col(dynamics::hip_sagittal_index(side)) = sagittal_axis;
        knee.angular_bias =
            ry_t * hip.angular_bias + knee.omega.cross(j.sagittal_rate * sagittal_axis);
    }
    return frames;
}

Vec3 center_of_mass(const RobotMorphology& morph, const FullState& state)
{
    Vec3 weighted = morph.m_body * state.position;
    for (Side side : {Side::left, Side::right}) {
        const LegOffsets o = leg_offsets(morph, state.leg(side), side);
        weighted += morph.m_hip * (state.position + state.rotation * o.hip);
        weighted += morph.m_knee * (state.position + state.rotation * o.knee);
    }
    return weighted / morph.total_mass();
}

PointJacobian com_jacobian(const RobotMorphology& morph, const FullState& state)
{
    const MassFrames frames = mass_frames(morph, state);
    PointJacobian jac = PointJacobian::Zero();
    double mass = 0.0;
    for (const MassFrame& f : frames) {
        jac += f.mass * f.linear;
        mass += f.mass;
    }
    return jac / mass;
}

Mat3 leg_jacobian(const RobotMorphology& morph, const LegJoints& joints, Side side)
{
    const LegDerivatives d = leg_derivatives(morph, joints, side);
    Mat3 jac;
    for (int joint = 0; joint < 3; ++joint) {
        jac.col(joint) = d.partial[joint][2];
    }
    return jac;
}

LegIkSolution leg_inverse_kinematics(const RobotMorphology& morph, const Vec3& foot_in_body,
                                     Side side, double knee_limit)
{
    using std::numbers::pi;
    LegIkSolution sol;
    const double sigma = mirror_sign(side);
    const Vec3 l2 = sided(morph.l2_pelvis, side);
    const Vec3 l3 = sided(morph.l3_hip, side);
    const Vec3 d = foot_in_body - sided(morph.l1_body, side);

    // Frontal angle: the hip-frame lateral offset must equal l2_y + l3_y.
    const double lateral = l2.y() + l3.y();
    const double rho = std::hypot(d.y(), d.z());
    const double beta = std::atan2(d.z(), d.y());
    double frontal;
    if (rho <= std::abs(lateral)) {
        frontal = lateral >= 0.0 ? beta : beta + pi;
        sol.clamped = true;
    } else {
        frontal = beta + std::acos(lateral / rho);
    }
    frontal = wrap_angle(frontal);
    sol.frontal = sigma * frontal;

    const Vec3 e = math::rot_x(frontal).transpose() * d - l2;

    // Knee: |[l3x - a - b sinφk, l3z - b cosφk]| must equal the planar reach.
    const double a = morph.l4a;
    const double b = morph.l4b;
    const double p = l3.x() - a;
    const double q = l3.z();
    const double reach2 = e.x() * e.x() + e.z() * e.z();
    const double rho2 = std::hypot(p, q);
    const double alpha = std::atan2(q, p);
    double kappa = (p * p + q * q + b * b - reach2) / (2.0 * b);
    if (std::abs(kappa) > rho2) {
        kappa = std::copysign(rho2, kappa);
        sol.clamped = true;
    }
    const double base = std::asin(kappa / rho2);
    const std::array<double, 2> candidates{wrap_angle(base - alpha), wrap_angle(pi - base - alpha)};
    double best = candidates[0];
    double best_violation = std::max(0.0, std::abs(best) - knee_limit);
    for (double c : candidates) {
        const double violation = std::max(0.0, std::abs(c) - knee_limit);
        if (violation < best_violation ||
            (violation == best_violation && std::abs(c) < std::abs(best))) {
            best = c;
            best_violation = violation;
        }
    }
    if (best_violation > 0.0) {
        best = std::copysign(knee_limit, best);
        sol.clamped = true;
    }
    sol.knee = best;

    // Sagittal hip angle aligns the thigh+shank vector with the target direction.
    const double ux = p - b * std::sin(sol.knee);
    const double uz = q - b * std::cos(sol.knee);
    sol.sagittal = wrap_angle(std::atan2(uz, ux) - std::atan2(e.z(), e.x()));
    return sol;
}

}  // namespace harpy::kinematics
