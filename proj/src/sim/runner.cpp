#include "harpy/sim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include "harpy/dynamics/dynamics.hpp"
#include "harpy/kinematics/kinematics.hpp"
#include "harpy/math/integrator.hpp"
#include "harpy/vlip/gait_scheduler.hpp"

namespace harpy::sim {

namespace {

using dynamics::FullState;
using math::LieDerivative;
using math::LieState;
using math::Mat3;
using vlip::CapturePlan;
using vlip::GaitScheduler;
using vlip::ThrustCommand;
using vlip::VlipState;

constexpr double kMaxTilt = std::numbers::pi / 3.0;  // 60°
constexpr double kFallHeightRatio = 0.5;
// Full-order integration state: the 21 rest entries of the robot, then the
// work done by inputs and contact, then the time since the last control tick.
constexpr int kWorkIndex = 21;
constexpr int kClockIndex = 22;
constexpr int kRestSize = 23;
constexpr double kAnchorRelease = 0.002;  // foot height that releases a stance anchor, m

void require(bool ok, const char* key, const char* what)
{
    if (!ok) {
        throw InvalidScenario(key, what);
    }
}

long tick_of(double time, double rate)
{
    return std::lround(time * rate);
}

double side_value(Side s) { return static_cast<double>(kinematics::index(s)); }

/// Sums impulses landing on the same control tick.
std::map<long, Vec3> disturbance_ticks(const Scenario& s)
{
    std::map<long, Vec3> out;
    for (const Disturbance& d : s.disturbances) {
        auto [it, inserted] = out.emplace(tick_of(d.time, s.control_rate), d.impulse);
        if (!inserted) {
            it->second += d.impulse;
        }
    }
    return out;
}

Eigen::Vector2d seeded_velocity_noise(const Scenario& s)
{
    if (s.initial.velocity_noise <= 0.0) {
        return Eigen::Vector2d::Zero();
    }
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> noise(0.0, s.initial.velocity_noise);
    const double vx = noise(rng);
    const double vy = noise(rng);
    return {vx, vy};
}

/// Tracks cycle-to-cycle differences at left touchdown.
class PoincareSection {
public:
    void sample(const Vec3& com, const Vec3& com_velocity, const Vec3& cop)
    {
        Eigen::Vector4d s;
        s << com.x() - cop.x(), com.y() - cop.y(), com_velocity.x(), com_velocity.y();
        if (last_) {
            residuals_.push_back((s - *last_).norm());
        }
        last_ = s;
    }

    void finish(RunMetrics& m, double threshold) const
    {
        m.limit_cycle_residuals = residuals_;
        if (residuals_.empty()) {
            return;
        }
        m.limit_cycle_residual = residuals_.back();
        int k = static_cast<int>(residuals_.size());
        while (k > 0 && residuals_[k - 1] < threshold) {
            --k;
        }
        m.cycles_to_converge = k == static_cast<int>(residuals_.size()) ? 0 : k + 1;
    }

private:
    std::optional<Eigen::Vector4d> last_;
    std::vector<double> residuals_;
};

/// Running height-error statistics and recovery bookkeeping shared by both plants.
struct Accumulators {
    double height_error_sum = 0.0;
    long samples = 0;
    double first_disturbance = std::numeric_limits<double>::infinity();
    std::optional<Vec3> previous_cop;

    void height(RunMetrics& m, double com_z, double z0)
    {
        const double e = std::abs(com_z - z0);
        height_error_sum += e;
        ++samples;
        m.max_com_height_error = std::max(m.max_com_height_error, e);
    }

    void step(RunMetrics& m, double t, const Vec3& cop)
    {
        if (previous_cop && t >= first_disturbance - 1e-9) {
            m.recovery_step_length =
                std::max(m.recovery_step_length, std::abs(cop.x() - previous_cop->x()));
        }
        previous_cop = cop;
    }

    void finish(RunMetrics& m) const
    {
        m.mean_com_height_error = samples > 0 ? height_error_sum / static_cast<double>(samples) : 0.0;
    }
};

// ---------------------------------------------------------------------------
// Pendulum plant

RunResult run_vlip(const Scenario& sc)
{
    RunResult result;
    RunMetrics& metrics = result.metrics;
    TrajectoryLog& log = result.log;
    log.columns = log_columns(Plant::vlip);
    log.sample_rate = sc.log_rate;

    const auto& morph = sc.morphology;
    const vlip::GaitConfig& gait = sc.gait;
    const double mass = morph.total_mass();
    const double g = morph.gravity;
    const ThrustCommand thrust = ThrustCommand::vertical(gait.commanded_thrust(mass, g));

    Vec3 p(sc.initial.com_xy.x(), sc.initial.com_xy.y(), gait.z0);
    Vec3 v(sc.initial.com_velocity_xy.x(), sc.initial.com_velocity_xy.y(), 0.0);
    v.head<2>() += seeded_velocity_noise(sc);
    Vec3 cop(sc.initial.stance_foot_xy.x(), sc.initial.stance_foot_xy.y(), 0.0);

    vlip::SchedulerConfig sched_cfg{gait.step_period, gait.min_stance_time, gait.airborne_grace,
                                    sc.initial.stance};
    GaitScheduler scheduler(sched_cfg, 0.0);

    const auto impulses = disturbance_ticks(sc);
    Accumulators acc;
    for (const Disturbance& d : sc.disturbances) {
        acc.first_disturbance = std::min(acc.first_disturbance, d.time);
    }
    PoincareSection poincare;

    const long ticks = tick_of(sc.duration, sc.control_rate);
    const long log_every = std::max(1L, std::lround(sc.control_rate / sc.log_rate));
    const int substeps = sc.substeps();
    const double max_lean = gait.z0 * std::tan(kMaxTilt);

    auto pendulum = [&](const Vec3& pos, const Vec3& vel) {
        VlipState s;
        s.position = pos;
        s.velocity = vel;
        s.cop = cop;
        s.z0 = gait.z0;
        s.mass = mass;
        s.gravity = g;
        return s;
    };

    for (long k = 0; k <= ticks; ++k) {
        const double t = static_cast<double>(k) / sc.control_rate;
        metrics.simulated_time = t;

        // Scheduler: the swing foot lands at the plan computed on this tick.
        const Side swing = scheduler.current().swing;
        const double in_stance = t - scheduler.stance_start();
        const CapturePlan placement = vlip::plan_step(pendulum(p, v), thrust, gait, swing, in_stance);
        const bool left_contact = swing != Side::left || placement.step_due;
        const bool right_contact = swing != Side::right || placement.step_due;
        const vlip::GaitPhase phase = scheduler.update(t, left_contact, right_contact);
        if (phase.step_event) {
            cop = placement.target;
            ++metrics.steps;
            metrics.clamped_steps += placement.clamped ? 1 : 0;
            log.events.push_back({t, phase.stance, cop, p, v, placement.clamped});
            acc.step(metrics, t, cop);
            if (phase.stance == Side::left) {
                poincare.sample(p, v, cop);
            }
        }

        if (auto it = impulses.find(k); it != impulses.end()) {
            v += it->second / mass;
        }

        const CapturePlan plan =
            vlip::plan_step(pendulum(p, v), thrust, gait, phase.swing, phase.time_in_stance);
        const double u_r = vlip::height_hold_input(pendulum(p, v), thrust);
        const vlip::VlipAcceleration dyn = vlip::vlip_dynamics(pendulum(p, v), u_r, thrust);
        metrics.infeasible_samples += dyn.feasible ? 0 : 1;
        metrics.min_normal_force =
            k == 0 ? dyn.leg_force.z() : std::min(metrics.min_normal_force, dyn.leg_force.z());
        metrics.thruster_impulse += thrust.magnitude() / sc.control_rate;
        acc.height(metrics, p.z(), gait.z0);

        if (k % log_every == 0) {
            const Vec3 rel = p - cop;
            const double g_eff = plan.g_eff;
            std::vector<double> row;
            row.reserve(log.columns.size());
            row.push_back(t);
            for (int i = 0; i < 3; ++i) row.push_back(p[i]);
            for (int i = 0; i < 3; ++i) row.push_back(v[i]);
            row.push_back(u_r);
            for (int i = 0; i < 3; ++i) row.push_back(thrust.force[i]);
            for (int i = 0; i < 3; ++i) row.push_back(dyn.leg_force[i]);
            for (int i = 0; i < 3; ++i) row.push_back(cop[i]);
            for (int i = 0; i < 3; ++i) row.push_back(p[i]);
            for (int i = 0; i < 3; ++i) row.push_back(v[i]);
            row.push_back(side_value(phase.stance));
            row.push_back(phase.phase);
            row.push_back(plan.target.x());
            row.push_back(plan.target.y());
            row.push_back(dyn.lambda);
            row.push_back(vlip::orbital_energy(rel.x(), v.x(), gait.z0, g_eff).energy);
            row.push_back(vlip::orbital_energy(rel.y(), v.y(), gait.z0, g_eff).energy);
            log.rows.push_back(std::move(row));
        }

        if ((p - cop).head<2>().norm() > max_lean) {
            metrics.fell = true;
            metrics.fall_time = t;
            metrics.fall_reason = "pendulum inclination above 60 deg";
            break;
        }
        if (k == ticks) {
            break;
        }

        try {
            Eigen::VectorXd x(6);
            x << p, v;
            auto f = [&](const Eigen::VectorXd& s) {
                const VlipState ps = pendulum(s.head<3>(), s.tail<3>());
                const double ur = vlip::height_hold_input(ps, thrust);
                Eigen::VectorXd d(6);
                d << s.tail<3>(), vlip::vlip_dynamics(ps, ur, thrust).acceleration;
                return d;
            };
            for (int i = 0; i < substeps; ++i) {
                x = math::rk4_step(f, x, sc.dt);
            }
            p = x.head<3>();
            v = x.tail<3>();
        } catch (const std::exception& e) {
            metrics.blew_up = true;
            metrics.error = e.what();
            break;
        }
    }

    acc.finish(metrics);
    poincare.finish(metrics, sc.poincare_threshold);
    return result;
}

// ---------------------------------------------------------------------------
// Full-order plant

struct FootPair {
    std::array<kinematics::FootKinematics, 2> feet;
    std::array<contact::ContactForce, 2> contact;
};

FootPair feet_and_contacts(const kinematics::RobotMorphology& morph,
                           const contact::GroundModelParams& ground, const FullState& s)
{
    FootPair out;
    for (Side side : {Side::left, Side::right}) {
        const int i = kinematics::index(side);
        out.feet[i] = kinematics::foot_kinematics(morph, s, side);
        out.contact[i] = contact::foot_contact(ground, out.feet[i].position, out.feet[i].velocity);
    }
    return out;
}

dynamics::Vector6 stacked_forces(const FootPair& f)
{
    dynamics::Vector6 u;
    u << f.contact[0].force, f.contact[1].force;
    return u;
}

double smoothstep(double s)
{
    s = std::clamp(s, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
}

double tilt_angle(const Mat3& r)
{
    return std::acos(std::clamp(r(2, 2), -1.0, 1.0));
}

RunResult run_full_order(const Scenario& sc)
{
    RunResult result;
    RunMetrics& metrics = result.metrics;
    TrajectoryLog& log = result.log;
    log.columns = log_columns(Plant::full_order);
    log.sample_rate = sc.log_rate;

    const auto& morph = sc.morphology;
    const vlip::GaitConfig& gait = sc.gait;
    const double mass = morph.total_mass();
    const double g = morph.gravity;
    const double vertical_thrust = gait.commanded_thrust(mass, g);
    const ThrustCommand thrust = ThrustCommand::vertical(vertical_thrust);

    FullState state = initial_full_state(sc);
    LieState x = dynamics::to_lie_state(state);
    x.rest.conservativeResize(kRestSize);
    x.rest[kWorkIndex] = 0.0;
    x.rest[kClockIndex] = 0.0;

    const auto impulses = disturbance_ticks(sc);
    Accumulators acc;
    for (const Disturbance& d : sc.disturbances) {
        acc.first_disturbance = std::min(acc.first_disturbance, d.time);
    }
    PoincareSection poincare;

    const long ticks = tick_of(sc.duration, sc.control_rate);
    const long log_every = std::max(1L, std::lround(sc.control_rate / sc.log_rate));
    const long audit_window = std::max(1L, tick_of(1.0, sc.control_rate));
    const int substeps = sc.substeps();
    const long walk_tick = sc.walking ? tick_of(sc.gains.settle_time, sc.control_rate) : ticks + 1;

    std::optional<GaitScheduler> scheduler;
    Side stance = sc.initial.stance;
    Vec3 stance_foot = Vec3::Zero();
    Vec3 liftoff = Vec3::Zero();
    Vec3 cop = Vec3::Zero();

    // Stand-mode CoM reference: midpoint of the feet, shifted toward the first
    // stance foot before walking starts.
    const FootPair feet0 = feet_and_contacts(morph, sc.ground, state);
    const Vec3 foot_mid = 0.5 * (feet0.feet[0].position + feet0.feet[1].position);
    const Vec3 first_stance_foot = feet0.feet[kinematics::index(sc.initial.stance)].position;
    const double shift_target =
        first_stance_foot.y() - kinematics::mirror_sign(sc.initial.stance) * sc.gains.stand_shift;
    const double shift_start = sc.gains.settle_time - sc.gains.shift_duration;

    ServoCommand command;
    std::array<std::optional<Eigen::Vector2d>, 2> anchor;
    std::vector<double> audit_marks;  // E − W at window boundaries

    auto derivative = [&](const LieState& s) {
        const FullState fs = dynamics::from_lie_state(s);
        const dynamics::DynamicsMatrices dyn = dynamics::dynamics_matrices(morph, fs);
        const dynamics::Vector6 ug = stacked_forces(feet_and_contacts(morph, sc.ground, fs));
        const dynamics::ControlInput u = command.evaluate(fs, s.rest[kClockIndex]);
        const dynamics::StateDerivative d = dynamics::forward_dynamics(fs, dyn, u, ug);
        const dynamics::Acceleration q =
            dyn.joint * u.joint + dyn.thrust * u.thrust + dyn.ground * ug;
        LieDerivative out;
        out.body_rate = d.body_rate;
        out.rest_rate.resize(kRestSize);
        out.rest_rate.head<21>() = d.rest;
        out.rest_rate[kWorkIndex] = fs.v().dot(q.head<dynamics::kVelocityDim>());
        out.rest_rate[kClockIndex] = 1.0;
        return out;
    };

    for (long k = 0; k <= ticks; ++k) {
        const double t = static_cast<double>(k) / sc.control_rate;
        metrics.simulated_time = t;
        state = dynamics::from_lie_state(x);
        FootPair feet = feet_and_contacts(morph, sc.ground, state);
        const bool left_contact = feet.contact[0].in_contact;
        const bool right_contact = feet.contact[1].in_contact;

        // Scheduler.
        vlip::GaitPhase phase;
        bool walking = false;
        if (k >= walk_tick) {
            walking = true;
            if (!scheduler) {
                vlip::SchedulerConfig cfg{gait.step_period, gait.min_stance_time,
                                          gait.airborne_grace, sc.initial.stance};
                scheduler.emplace(cfg, t);
                stance = sc.initial.stance;
                stance_foot = feet.feet[kinematics::index(stance)].position;
                liftoff = feet.feet[kinematics::index(kinematics::other(stance))].position;
            }
            phase = scheduler->update(t, left_contact, right_contact);
            if (phase.step_event) {
                stance = phase.stance;
                stance_foot = feet.feet[kinematics::index(stance)].position;
                liftoff = feet.feet[kinematics::index(phase.swing)].position;
                const Vec3 com = kinematics::center_of_mass(morph, state);
                const Vec3 com_vel = kinematics::com_jacobian(morph, state) * state.v();
                ++metrics.steps;
                log.events.push_back({t, stance, stance_foot, com, com_vel, false});
                acc.step(metrics, t, stance_foot);
                if (stance == Side::left) {
                    poincare.sample(com, com_vel, stance_foot);
                }
            }
            if (phase.airborne_fault) {
                metrics.fell = true;
                metrics.fall_time = t;
                metrics.fall_reason = "both feet airborne while walking";
                break;
            }
        }

        // Disturbance: Δv = M⁻¹ J_comᵀ ι, a CoM momentum change of exactly ι.
        if (auto it = impulses.find(k); it != impulses.end()) {
            const double before = dynamics::kinetic_energy(morph, state);
            const auto m = dynamics::mass_matrix(morph, state)
                               .topLeftCorner<dynamics::kVelocityDim, dynamics::kVelocityDim>();
            const kinematics::PointJacobian j = kinematics::com_jacobian(morph, state);
            state.set_v(state.v() + m.llt().solve(j.transpose() * it->second));
            x.rest.segment<dynamics::kVelocityDim>(9) = state.v();
            x.rest[kWorkIndex] += dynamics::kinetic_energy(morph, state) - before;
            feet = feet_and_contacts(morph, sc.ground, state);
        }

        const Vec3 com = kinematics::center_of_mass(morph, state);
        const Vec3 com_vel = kinematics::com_jacobian(morph, state) * state.v();

        // CoP: normal-force weighted average of the feet.
        const double fz_left = feet.contact[0].force.z();
        const double fz_right = feet.contact[1].force.z();
        if (fz_left + fz_right > 0.0) {
            cop = (fz_left * feet.feet[0].position + fz_right * feet.feet[1].position) /
                  (fz_left + fz_right);
        }

        // Stance feet are held where they landed.
        for (Side side : {Side::left, Side::right}) {
            const int i = kinematics::index(side);
            const bool stance_leg = !walking || side == stance;
            if (!stance_leg || feet.feet[i].position.z() > kAnchorRelease) {
                anchor[i].reset();
            } else if (!anchor[i] && feet.contact[i].in_contact) {
                anchor[i] = feet.feet[i].position.head<2>();
            }
        }

        // Planner and controller.
        TrackingRequest request;
        request.foot_anchor = anchor;
        if (!walking) {
            // Before touchdown a standing foot holds its initial position.
            for (int i = 0; i < 2; ++i) {
                if (!request.foot_anchor[i]) {
                    request.foot_anchor[i] = feet0.feet[i].position.head<2>();
                }
            }
        }
        request.z0 = gait.z0;
        request.vertical_thrust = vertical_thrust;
        request.ground_stiffness = sc.ground.k_gp;
        Vec3 target = Vec3::Zero();
        bool clamped = false;
        if (walking) {
            request.mode = TrackingMode::walk;
            request.stance = stance;
            VlipState vs;
            vs.position = com;
            vs.velocity = com_vel;
            vs.cop = Vec3(stance_foot.x(), stance_foot.y(), 0.0);
            vs.z0 = gait.z0;
            vs.mass = mass;
            vs.gravity = g;
            const double omega =
                std::sqrt(vlip::effective_gravity(mass, vertical_thrust, g) / gait.z0);
            const double horizon = std::max(0.0, gait.step_period - phase.time_in_stance);
            const vlip::LipPrediction pred =
                vlip::predict_lip((com - vs.cop).head<2>(), com_vel.head<2>(), omega, horizon);
            VlipState at_touchdown = vs;
            at_touchdown.position.head<2>() = vs.cop.head<2>() + pred.position;
            at_touchdown.velocity.head<2>() = pred.velocity;
            const CapturePlan plan =
                vlip::plan_step(at_touchdown, thrust, gait, phase.swing, gait.step_period);
            target = plan.target;
            target.z() = -gait.touchdown_depth;
            clamped = plan.clamped;
            request.swing = swing_trajectory(phase.phase, liftoff, target, gait.apex_height,
                                             gait.step_period);
            if (phase.step_event && clamped) {
                ++metrics.clamped_steps;
                log.events.back().clamped = true;
            }
        } else {
            request.mode = TrackingMode::stand;
            double y_ref = foot_mid.y();
            double y_rate = 0.0;
            if (sc.walking) {
                const double s = (t - shift_start) / sc.gains.shift_duration;
                y_ref += (shift_target - foot_mid.y()) * smoothstep(s);
                if (s > 0.0 && s < 1.0) {
                    y_rate = (shift_target - foot_mid.y()) * 6.0 * s * (1.0 - s) /
                             sc.gains.shift_duration;
                }
            }
            request.com_reference = Eigen::Vector2d(foot_mid.x(), y_ref);
            request.com_reference_rate = Eigen::Vector2d(0.0, y_rate);
        }
        const TrackingOutput control = whole_body_tracking(morph, state, request, sc.gains);
        command = control.command;
        x.rest[kClockIndex] = 0.0;

        // Metrics at the control tick.
        const dynamics::Vector6 ug = stacked_forces(feet);
        std::array<double, 2> knee_torque{};
        for (int i = 0; i < 2; ++i) {
            knee_torque[i] = -feet.feet[i].knee_column.dot(ug.segment<3>(3 * i));
        }
        for (int i = 0; i < 4; ++i) {
            metrics.peak_joint_torque =
                std::max(metrics.peak_joint_torque, std::abs(control.input.joint[i]));
        }
        for (double tau : knee_torque) {
            metrics.peak_knee_torque = std::max(metrics.peak_knee_torque, std::abs(tau));
            metrics.peak_joint_torque = std::max(metrics.peak_joint_torque, std::abs(tau));
        }
        metrics.thruster_impulse +=
            (control.input.thrust.head<3>().norm() + control.input.thrust.tail<3>().norm()) /
            sc.control_rate;
        const double min_fz = std::min(ug[2], ug[5]);
        metrics.min_normal_force = k == 0 ? min_fz : std::min(metrics.min_normal_force, min_fz);
        acc.height(metrics, com.z(), gait.z0);

        const double energy = dynamics::total_energy(morph, state);
        const double work = x.rest[kWorkIndex];
        if (k % audit_window == 0) {
            audit_marks.push_back(energy - work);
            if (audit_marks.size() >= 2) {
                const double drift = audit_marks.back() - audit_marks[audit_marks.size() - 2];
                metrics.energy_audit_error = std::max(metrics.energy_audit_error, std::abs(drift));
            }
        }

        if (k % log_every == 0) {
            std::vector<double> row;
            row.reserve(log.columns.size());
            row.push_back(t);
            const dynamics::StateVector sv = state.to_vector();
            for (int i = 0; i < dynamics::kStateDim; ++i) row.push_back(sv[i]);
            for (int i = 0; i < 6; ++i) row.push_back(control.input.joint[i]);
            for (int i = 0; i < 6; ++i) row.push_back(control.input.thrust[i]);
            for (int i = 0; i < 6; ++i) row.push_back(ug[i]);
            for (int i = 0; i < 3; ++i) row.push_back(cop[i]);
            for (int i = 0; i < 3; ++i) row.push_back(com[i]);
            for (int i = 0; i < 3; ++i) row.push_back(com_vel[i]);
            row.push_back(walking ? side_value(stance) : -1.0);
            row.push_back(walking ? phase.phase : 0.0);
            row.push_back(target.x());
            row.push_back(target.y());
            row.push_back(knee_torque[0]);
            row.push_back(knee_torque[1]);
            row.push_back(left_contact ? 1.0 : 0.0);
            row.push_back(right_contact ? 1.0 : 0.0);
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 3; ++j) row.push_back(feet.feet[i].position[j]);
            }
            row.push_back(energy);
            row.push_back(work);
            log.rows.push_back(std::move(row));
        }

        if (com.z() < kFallHeightRatio * gait.z0) {
            metrics.fell = true;
            metrics.fall_time = t;
            metrics.fall_reason = "CoM height below half of z0";
            break;
        }
        if (tilt_angle(state.rotation.matrix()) > kMaxTilt) {
            metrics.fell = true;
            metrics.fall_time = t;
            metrics.fall_reason = "torso tilt above 60 deg";
            break;
        }
        if (k == ticks) {
            break;
        }

        try {
            for (int i = 0; i < substeps; ++i) {
                x = math::rk4_step(derivative, x, sc.dt);
            }
            if (!x.rest.allFinite()) {
                throw math::NonFiniteDerivative("non-finite state after integration");
            }
        } catch (const std::exception& e) {
            metrics.blew_up = true;
            metrics.error = e.what();
            break;
        }
    }

    acc.finish(metrics);
    poincare.finish(metrics, sc.poincare_threshold);
    return result;
}

}  // namespace

const char* to_string(Plant p)
{
    return p == Plant::vlip ? "vlip" : "full_order";
}

void Scenario::validate() const
{
    morphology.validate();
    ground.validate();
    gait.validate();
    gains.validate();
    validate_fields();
}

void Scenario::validate_fields() const
{
    require(!name.empty(), "name", "must not be empty");
    require(std::isfinite(duration) && duration > 0.0, "duration", "must be > 0");
    require(std::isfinite(control_rate) && control_rate > 0.0, "control_rate", "must be > 0");
    require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
    require(dt * control_rate <= 1.0 + 1e-12, "dt",
            "control rate must not exceed 1/dt (dt * control_rate <= 1)");
    const double ratio = 1.0 / (dt * control_rate);
    require(std::abs(ratio - std::round(ratio)) < 1e-6, "dt",
            "1/(dt * control_rate) must be an integer number of physics steps");
    require(std::isfinite(log_rate) && log_rate > 0.0 && log_rate <= control_rate, "log_rate",
            "must lie in (0, control_rate]");
    require(std::isfinite(poincare_threshold) && poincare_threshold > 0.0, "poincare_threshold",
            "must be > 0");
    require(initial.com_xy.allFinite() && initial.com_velocity_xy.allFinite() &&
                initial.stance_foot_xy.allFinite(),
            "initial", "entries must be finite");
    require(std::isfinite(initial.drop_height) && initial.drop_height >= 0.0,
            "initial.drop_height", "must be >= 0");
    require(std::isfinite(initial.stance_width) && initial.stance_width > 0.0,
            "initial.stance_width", "must be > 0");
    require(std::isfinite(initial.velocity_noise) && initial.velocity_noise >= 0.0,
            "initial.velocity_noise", "must be >= 0");
    for (const Disturbance& d : disturbances) {
        require(std::isfinite(d.time) && d.time >= 0.0, "disturbances.time", "must be >= 0");
        require(d.impulse.allFinite(), "disturbances.impulse", "must be finite");
    }
}

int Scenario::substeps() const
{
    return std::max(1, static_cast<int>(std::lround(1.0 / (dt * control_rate))));
}

std::size_t TrajectoryLog::column(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw std::out_of_range("no log column named " + name);
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> TrajectoryLog::series(const std::string& name) const
{
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r[c]);
    }
    return out;
}

std::vector<std::string> log_columns(Plant plant)
{
    std::vector<std::string> c{"t"};
    auto add = [&](std::initializer_list<const char*> names) {
        for (const char* n : names) {
            c.emplace_back(n);
        }
    };
    if (plant == Plant::vlip) {
        add({"p_x", "p_y", "p_z", "v_x", "v_y", "v_z"});
        add({"u_r"});
        add({"u_t_x", "u_t_y", "u_t_z"});
        add({"u_g_x", "u_g_y", "u_g_z"});
        add({"cop_x", "cop_y", "cop_z"});
        add({"com_x", "com_y", "com_z", "com_vx", "com_vy", "com_vz"});
        add({"stance", "phase", "target_x", "target_y", "lambda", "energy_x", "energy_y"});
        return c;
    }
    add({"r00", "r01", "r02", "r10", "r11", "r12", "r20", "r21", "r22"});
    add({"p_x", "p_y", "p_z", "gamma_L", "gamma_R", "phi_h_L", "phi_h_R"});
    add({"phi_k_L", "phi_k_R"});
    add({"w_x", "w_y", "w_z", "v_x", "v_y", "v_z", "gamma_dot_L", "gamma_dot_R", "phi_h_dot_L",
         "phi_h_dot_R"});
    add({"phi_k_dot_L", "phi_k_dot_R"});
    add({"u_P_L", "u_P_R", "u_H_L", "u_H_R", "u_kdd_L", "u_kdd_R"});
    add({"u_t_L_x", "u_t_L_y", "u_t_L_z", "u_t_R_x", "u_t_R_y", "u_t_R_z"});
    add({"u_g_L_x", "u_g_L_y", "u_g_L_z", "u_g_R_x", "u_g_R_y", "u_g_R_z"});
    add({"cop_x", "cop_y", "cop_z"});
    add({"com_x", "com_y", "com_z", "com_vx", "com_vy", "com_vz"});
    add({"stance", "phase", "target_x", "target_y", "knee_torque_L", "knee_torque_R",
         "contact_L", "contact_R", "foot_L_x", "foot_L_y", "foot_L_z", "foot_R_x", "foot_R_y",
         "foot_R_z", "energy", "work"});
    return c;
}

dynamics::FullState initial_full_state(const Scenario& sc)
{
    const auto& morph = sc.morphology;
    const double half = 0.5 * sc.initial.stance_width;
    const Vec3 com_target(sc.initial.com_xy.x(), sc.initial.com_xy.y(),
                          sc.gait.z0 + sc.initial.drop_height);
    FullState s;
    s.position = com_target;
    for (int iter = 0; iter < 50; ++iter) {
        for (Side side : {Side::left, Side::right}) {
            const Vec3 foot(com_target.x(), com_target.y() + kinematics::mirror_sign(side) * half,
                            sc.initial.drop_height);
            const kinematics::LegIkSolution ik =
                kinematics::leg_inverse_kinematics(morph, foot - s.position, side);
            if (ik.clamped) {
                throw InvalidScenario("initial", "standing pose is outside the leg workspace");
            }
            s.set_leg(side, {ik.frontal, ik.sagittal, ik.knee, 0.0, 0.0, 0.0});
        }
        const Vec3 err = com_target - kinematics::center_of_mass(morph, s);
        s.position += err;
        if (err.norm() < 1e-13) {
            break;
        }
    }
    s.velocity = Vec3(sc.initial.com_velocity_xy.x(), sc.initial.com_velocity_xy.y(), 0.0);
    s.velocity.head<2>() += seeded_velocity_noise(sc);
    return s;
}

RunResult run_scenario(const Scenario& scenario)
{
    scenario.validate();
    return scenario.plant == Plant::vlip ? run_vlip(scenario) : run_full_order(scenario);
}

}  // namespace harpy::sim
