#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "harpy/dynamics/state.hpp"
#include "harpy/kinematics/morphology.hpp"
#include "harpy/math/integrator.hpp"

namespace harpy::dynamics {

using kinematics::RobotMorphology;

using MassMatrix = Eigen::Matrix<double, kAccelDim, kAccelDim>;
using InputMap = Eigen::Matrix<double, kAccelDim, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Joint and thruster commands.
struct ControlInput {
    /// [u_PL, u_PR, u_HL, u_HR, ü_kL, ü_kR]: frontal and sagittal hip torques
    /// (N·m) followed by knee accelerations (rad/s²).
    Vector6 joint = Vector6::Zero();
    /// [u_tL; u_tR] inertial-frame thruster forces (N).
    Vector6 thrust = Vector6::Zero();
};

struct DynamicsMatrices {
    MassMatrix mass = MassMatrix::Zero();
    Acceleration bias = Acceleration::Zero();
    InputMap joint = InputMap::Zero();
    InputMap thrust = InputMap::Zero();
    InputMap ground = InputMap::Zero();
};

class SingularMassMatrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Condition-number ceiling for the mass-carrying block of M.
inline constexpr double kMaxCondition = 1e12;

/// M = Σ m_i J_iᵀJ_i + J_ω,iᵀ Î_i J_ω,i over {B, H_L, K_L, H_R, K_R}, with
/// identity rows for the two knee coordinates.
MassMatrix mass_matrix(const RobotMorphology& morph, const FullState& state);

/// h = Σ J_iᵀ m_i (J̇_i v − g) + J_ω,iᵀ (Î_i J̇_ω,i v + ω_i × Î_i ω_i); knee rows zero.
Acceleration bias_vector(const RobotMorphology& morph, const FullState& state);

struct InputMaps {
    InputMap joint;   // [0; I6]
    InputMap thrust;  // [J_TLᵀ J_TRᵀ; 0]
    InputMap ground;  // [J_FLᵀ J_FRᵀ; 0]
};
InputMaps input_maps(const RobotMorphology& morph, const FullState& state);

DynamicsMatrices dynamics_matrices(const RobotMorphology& morph, const FullState& state);

/// Generalized force B_j u_j + B_t u_t + B_g u_g.
Acceleration generalized_force(const InputMaps& maps, const ControlInput& u, const Vector6& ground);

/// ẋ split into the attitude rate and the flat remainder
/// [q̇; φ̇_k; a] matching the layout of LieState::rest.
struct StateDerivative {
    Vec3 body_rate = Vec3::Zero();
    Eigen::Matrix<double, 21, 1> rest = Eigen::Matrix<double, 21, 1>::Zero();

    Acceleration acceleration() const { return rest.tail<kAccelDim>(); }
    /// Full 30-entry ẋ with Ṙ_B = R_B skew(ω_B^B) flattened row-major.
    StateVector flatten(const Rotation3& r) const;
};

/// Solves M a + h = B_j u_j + B_t u_t + B_g u_g for a.
/// Throws SingularMassMatrix when cond(M) exceeds kMaxCondition.
StateDerivative forward_dynamics(const RobotMorphology& morph, const FullState& state,
                                 const ControlInput& u, const Vector6& ground);

/// Same, given precomputed matrices.
StateDerivative forward_dynamics(const FullState& state, const DynamicsMatrices& dyn,
                                 const ControlInput& u, const Vector6& ground);

/// [q; φ_k; v; φ̇_k] with the rotation kept separately.
math::LieState to_lie_state(const FullState& state);
FullState from_lie_state(const math::LieState& x);

double kinetic_energy(const RobotMorphology& morph, const FullState& state);
/// Gravitational potential Σ m_i g z_i (zero at ground level).
double potential_energy(const RobotMorphology& morph, const FullState& state);
double total_energy(const RobotMorphology& morph, const FullState& state);

/// Angular momentum about the CoM, inertial frame.
Vec3 angular_momentum(const RobotMorphology& morph, const FullState& state);

/// Mechanical power delivered by all inputs, vᵀ Q over the mass-carrying rows.
double input_power(const FullState& state, const InputMaps& maps, const ControlInput& u,
                   const Vector6& ground);

}  // namespace harpy::dynamics
