#include "harpy/dynamics/dynamics.hpp"

#include <string>

#include "harpy/kinematics/kinematics.hpp"

namespace harpy::dynamics {

namespace {

using kinematics::MassFrame;
using kinematics::MassFrames;
using kinematics::Point;

constexpr int kMassDim = kVelocityDim;

Eigen::Matrix<double, kMassDim, kMassDim> mass_block(const MassFrames& frames)
{
    Eigen::Matrix<double, kMassDim, kMassDim> m = Eigen::Matrix<double, kMassDim, kMassDim>::Zero();
    for (const MassFrame& f : frames) {
        m.noalias() += f.mass * f.linear.transpose() * f.linear;
        m.noalias() += f.angular.transpose() * f.inertia * f.angular;
    }
    return 0.5 * (m + m.transpose());
}

Velocity bias_block(const MassFrames& frames, double gravity)
{
    const Vec3 g(0.0, 0.0, -gravity);
    Velocity h = Velocity::Zero();
    for (const MassFrame& f : frames) {
        h.noalias() += f.linear.transpose() * (f.mass * (f.linear_bias - g));
        h.noalias() += f.angular.transpose() *
                       (f.inertia * f.angular_bias + f.omega.cross(f.inertia * f.omega));
    }
    return h;
}

}  // namespace

MassMatrix mass_matrix(const RobotMorphology& morph, const FullState& state)
{
    MassMatrix m = MassMatrix::Identity();
    m.topLeftCorner<kMassDim, kMassDim>() = mass_block(kinematics::mass_frames(morph, state));
    return m;
}

Acceleration bias_vector(const RobotMorphology& morph, const FullState& state)
{
    Acceleration h = Acceleration::Zero();
    h.head<kMassDim>() = bias_block(kinematics::mass_frames(morph, state), morph.gravity);
    return h;
}

InputMaps input_maps(const RobotMorphology& morph, const FullState& state)
{
    InputMaps maps;
    maps.joint.setZero();
    maps.joint.bottomRows<6>().setIdentity();
    maps.thrust.setZero();
    maps.ground.setZero();
    for (Side side : {Side::left, Side::right}) {
        const int col = 3 * kinematics::index(side);
        maps.thrust.block<kMassDim, 3>(0, col) =
            kinematics::position_jacobian(morph, state, Point::thruster, side).transpose();
        maps.ground.block<kMassDim, 3>(0, col) =
            kinematics::position_jacobian(morph, state, Point::foot, side).transpose();
    }
    return maps;
}

DynamicsMatrices dynamics_matrices(const RobotMorphology& morph, const FullState& state)
{
    const MassFrames frames = kinematics::mass_frames(morph, state);
    DynamicsMatrices d;
    d.mass.setIdentity();
    d.mass.topLeftCorner<kMassDim, kMassDim>() = mass_block(frames);
    d.bias.head<kMassDim>() = bias_block(frames, morph.gravity);
    const InputMaps maps = input_maps(morph, state);
    d.joint = maps.joint;
    d.thrust = maps.thrust;
    d.ground = maps.ground;
    return d;
}

Acceleration generalized_force(const InputMaps& maps, const ControlInput& u, const Vector6& ground)
{
    return maps.joint * u.joint + maps.thrust * u.thrust + maps.ground * ground;
}

StateVector StateDerivative::flatten(const Rotation3& r) const
{
    StateVector x;
    const math::Mat3 r_dot = r.matrix() * math::skew(body_rate);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            x[3 * i + j] = r_dot(i, j);
        }
    }
    x.tail<21>() = rest;
    return x;
}

StateDerivative forward_dynamics(const RobotMorphology& morph, const FullState& state,
                                 const ControlInput& u, const Vector6& ground)
{
    return forward_dynamics(state, dynamics_matrices(morph, state), u, ground);
}

StateDerivative forward_dynamics(const FullState& state, const DynamicsMatrices& dyn,
                                 const ControlInput& u, const Vector6& ground)
{
    const Acceleration q_force = dyn.joint * u.joint + dyn.thrust * u.thrust + dyn.ground * ground;
    const Acceleration rhs = q_force - dyn.bias;

    const auto m = dyn.mass.topLeftCorner<kMassDim, kMassDim>();
    Eigen::LLT<Eigen::Matrix<double, kMassDim, kMassDim>> llt(m);
    if (llt.info() != Eigen::Success) {
        throw SingularMassMatrix("mass matrix is not positive definite");
    }
    const double rcond = llt.rcond();
    if (!(rcond * kMaxCondition > 1.0)) {
        throw SingularMassMatrix("mass matrix condition estimate " + std::to_string(1.0 / rcond) +
                                 " exceeds limit");
    }

    StateDerivative d;
    d.body_rate = state.body_rate;
    d.rest.segment<7>(0) = state.v().tail<7>();
    d.rest.segment<2>(7) = state.knee_rate;
    d.rest.segment<kMassDim>(9) = llt.solve(rhs.head<kMassDim>());
    d.rest.segment<2>(19) = rhs.tail<2>();
    return d;
}

math::LieState to_lie_state(const FullState& state)
{
    return math::LieState{state.rotation, state.to_vector().tail<21>()};
}

FullState from_lie_state(const math::LieState& x)
{
    FullState s;
    s.rotation = x.rotation;
    s.position = x.rest.segment<3>(0);
    s.hip_frontal = x.rest.segment<2>(3);
    s.hip_sagittal = x.rest.segment<2>(5);
    s.knee = x.rest.segment<2>(7);
    s.set_v(x.rest.segment<kVelocityDim>(9));
    s.knee_rate = x.rest.segment<2>(19);
    return s;
}

double kinetic_energy(const RobotMorphology& morph, const FullState& state)
{
    double k = 0.0;
    for (const MassFrame& f : kinematics::mass_frames(morph, state)) {
        k += 0.5 * f.mass * f.velocity.squaredNorm() + 0.5 * f.omega.dot(f.inertia * f.omega);
    }
    return k;
}

double potential_energy(const RobotMorphology& morph, const FullState& state)
{
    double v = 0.0;
    for (const MassFrame& f : kinematics::mass_frames(morph, state)) {
        v += f.mass * morph.gravity * f.position.z();
    }
    return v;
}

double total_energy(const RobotMorphology& morph, const FullState& state)
{
    return kinetic_energy(morph, state) + potential_energy(morph, state);
}

Vec3 angular_momentum(const RobotMorphology& morph, const FullState& state)
{
    const MassFrames frames = kinematics::mass_frames(morph, state);
    double mass = 0.0;
    Vec3 com = Vec3::Zero();
    Vec3 com_velocity = Vec3::Zero();
    for (const MassFrame& f : frames) {
        mass += f.mass;
        com += f.mass * f.position;
        com_velocity += f.mass * f.velocity;
    }
    com /= mass;
    com_velocity /= mass;

    Vec3 l = Vec3::Zero();
    for (const MassFrame& f : frames) {
        l += f.mass * (f.position - com).cross(f.velocity - com_velocity);
        l += f.rotation * (f.inertia * f.omega);
    }
    return l;
}

double input_power(const FullState& state, const InputMaps& maps, const ControlInput& u,
                   const Vector6& ground)
{
    return state.v().dot(generalized_force(maps, u, ground).head<kMassDim>());
}

}  // namespace harpy::dynamics
