#include <cmath>

#include <gtest/gtest.h>

#include "harpy/math/integrator.hpp"
#include "harpy/vlip/capture.hpp"
#include "harpy/vlip/gait_scheduler.hpp"
#include "harpy/vlip/vlip.hpp"
#include "support.hpp"

namespace harpy::vlip {
namespace {

using test::Gen;

VlipState pendulum(double x, double x_dot, double z0 = 0.5, double mass = 10.0)
{
    VlipState s;
    s.position = Vec3(x, 0.0, z0);
    s.velocity = Vec3(x_dot, 0.0, 0.0);
    s.z0 = z0;
    s.mass = mass;
    return s;
}

TEST(VlipDynamics, StaticUprightCarriesFullWeight)
{
    const VlipState s = pendulum(0.0, 0.0);
    const VlipAcceleration a = vlip_dynamics(s, 0.0, ThrustCommand{});
    EXPECT_LE(a.acceleration.norm(), 1e-12);
    EXPECT_NEAR(a.leg_force.norm(), s.mass * s.gravity, 1e-12);
    EXPECT_NEAR(a.lambda * s.leg().norm(), s.mass * s.gravity, 1e-12);
    EXPECT_TRUE(a.feasible);
    EXPECT_NEAR(height_hold_input(s, ThrustCommand{}), 0.0, 1e-12);
}

TEST(VlipDynamics, FullThrustHoverCancelsGravityFromAnyState)
{
    Gen gen(71);
    for (int i = 0; i < 100; ++i) {
        VlipState s = pendulum(gen.uniform(-0.3, 0.3), gen.uniform(-1, 1), gen.uniform(0.3, 0.6));
        s.velocity = gen.vec(1.0);
        s.cop = Vec3(gen.uniform(-0.2, 0.2), gen.uniform(-0.2, 0.2), 0.0);
        const VlipAcceleration a = vlip_dynamics(s, 0.0, ThrustCommand::vertical(s.mass * s.gravity));
        EXPECT_LE(a.acceleration.norm(), 1e-12);
    }
}

TEST(VlipDynamics, PropertyLinearPendulumModeMatchesBuoyancyEquation)
{
    Gen gen(72);
    for (int i = 0; i < 1000; ++i) {
        const double z0 = gen.uniform(0.2, 1.0);
        VlipState s = pendulum(gen.uniform(-0.3, 0.3), gen.uniform(-1, 1), z0, gen.uniform(1, 20));
        s.position.y() = gen.uniform(-0.3, 0.3);
        const double u = gen.uniform(0.0, 0.9) * s.mass * s.gravity;
        const ThrustCommand thrust = ThrustCommand::vertical(u);
        const VlipAcceleration a = vlip_dynamics(s, height_hold_input(s, thrust), thrust);
        const double g_eff = s.gravity - u / s.mass;
        EXPECT_NEAR(a.acceleration.x(), g_eff * s.position.x() / z0, 1e-10);
        EXPECT_NEAR(a.acceleration.y(), g_eff * s.position.y() / z0, 1e-10);
        EXPECT_NEAR(a.acceleration.z(), 0.0, 1e-10);
        EXPECT_TRUE(a.feasible);
    }
}

TEST(VlipDynamics, PullingLegIsReportedNotClamped)
{
    const VlipState s = pendulum(0.0, 0.0);
    const VlipAcceleration a = vlip_dynamics(s, -20.0, ThrustCommand{});
    EXPECT_FALSE(a.feasible);
    EXPECT_LT(a.lambda, 0.0);
    EXPECT_NEAR(a.acceleration.z(), -20.0 / s.z0, 1e-12);
}

TEST(VlipDynamics, DegeneratePendulumRejected)
{
    VlipState s = pendulum(0.0, 0.0);
    s.cop = s.position;
    EXPECT_THROW(vlip_dynamics(s, 0.0, ThrustCommand{}), std::domain_error);
}

TEST(Projection, SagittalExamples)
{
    EXPECT_EQ(sagittal_projection(pendulum(0.0, 0.3), ThrustCommand::vertical(20.0)).x_ddot, 0.0);
    const PlanarState p = sagittal_projection(pendulum(0.1, 0.0), ThrustCommand::vertical(49.05));
    EXPECT_NEAR(p.x_ddot, 0.981, 1e-12);
    EXPECT_NEAR(p.lambda, (98.1 - 49.05) * std::hypot(0.1, 0.5) / 0.5, 1e-12);
}

TEST(Projection, PropertyTiltedThrustMatchesUnprojectedDynamics)
{
    Gen gen(73);
    for (int i = 0; i < 1000; ++i) {
        const VlipState s = pendulum(gen.uniform(-0.3, 0.3), gen.uniform(-1, 1), gen.uniform(0.3, 0.8));
        const ThrustCommand thrust =
            ThrustCommand::sagittal_tilt(gen.uniform(0.0, 0.8) * s.mass * s.gravity, gen.uniform(-0.5, 0.5));
        const PlanarState p = sagittal_projection(s, thrust);
        const VlipAcceleration a = vlip_dynamics(s, height_hold_input(s, thrust), thrust);
        EXPECT_NEAR(p.x_ddot, a.acceleration.x(), 1e-12);
        EXPECT_NEAR(p.lambda, a.leg_force.norm(), 1e-10);
        EXPECT_NEAR(p.theta_thrust, thrust.sagittal_tilt_angle(), 1e-15);
    }
}

TEST(Projection, FrontalUsesTheLateralAxis)
{
    VlipState s = pendulum(0.0, 0.0);
    s.position.y() = -0.08;
    const PlanarState p = frontal_projection(s, ThrustCommand::vertical(30.0));
    EXPECT_EQ(p.plane, Plane::frontal);
    EXPECT_NEAR(p.x_ddot, (s.gravity - 3.0) * -0.08 / 0.5, 1e-12);
}

TEST(Projection, RejectsNonPositiveEffectiveGravity)
{
    const VlipState s = pendulum(0.1, 0.0);
    EXPECT_THROW(sagittal_projection(s, ThrustCommand::vertical(s.mass * s.gravity)), InvalidThrust);
    EXPECT_NO_THROW(sagittal_projection(s, ThrustCommand::sagittal_tilt(s.mass * s.gravity, 0.3)));
}

TEST(Projection, SaddleEigenvaluesMatchBuoyancyFrequency)
{
    for (double fraction : {0.0, 0.25, 0.5, 0.75}) {
        const VlipState base = pendulum(0.0, 0.0);
        const double u = fraction * base.mass * base.gravity;
        const ThrustCommand thrust = ThrustCommand::vertical(u);
        const double h = 1e-4;
        const double slope = (sagittal_projection(pendulum(h, 0.0), thrust).x_ddot -
                              sagittal_projection(pendulum(-h, 0.0), thrust).x_ddot) / (2 * h);
        Eigen::Matrix2d a;
        a << 0.0, 1.0, slope, 0.0;
        const Eigen::Vector2cd ev = a.eigenvalues();
        const double expected = std::sqrt((base.gravity - u / base.mass) / base.z0);
        const double hi = std::max(ev[0].real(), ev[1].real());
        const double lo = std::min(ev[0].real(), ev[1].real());
        EXPECT_NEAR(hi, expected, 1e-9);
        EXPECT_NEAR(lo, -expected, 1e-9);
    }
}

TEST(OrbitalEnergy, Examples)
{
    const OrbitalEnergy rest = orbital_energy(0.0, 0.0, 0.5, 9.81);
    EXPECT_EQ(rest.energy, 0.0);
    EXPECT_EQ(rest.classification, EnergyClass::rest);

    const double omega = std::sqrt(9.81 / 0.5);
    EXPECT_NEAR(orbital_energy(0.2, -0.2 * omega, 0.5, 9.81).energy, 0.0, 1e-15);

    const OrbitalEnergy e = orbital_energy(0.1, 0.5, 0.5, 9.81);
    EXPECT_NEAR(e.energy, 0.0269, 1e-12);
    EXPECT_EQ(e.classification, EnergyClass::pass_over);
    EXPECT_EQ(orbital_energy(0.3, 0.1, 0.5, 9.81).classification, EnergyClass::reverse);
    EXPECT_THROW(orbital_energy(0.1, 0.1, 0.5, 0.0), std::domain_error);
}

TEST(OrbitalEnergy, PropertyClassificationFollowsSign)
{
    Gen gen(74);
    for (int i = 0; i < 10000; ++i) {
        const OrbitalEnergy e =
            orbital_energy(gen.uniform(-0.3, 0.3), gen.uniform(-1, 1), gen.uniform(0.2, 1), gen.uniform(1, 10));
        if (std::abs(e.energy) <= kOrbitalRestTol) {
            EXPECT_EQ(e.classification, EnergyClass::rest);
        } else if (e.energy > 0.0) {
            EXPECT_EQ(e.classification, EnergyClass::pass_over);
        } else {
            EXPECT_EQ(e.classification, EnergyClass::reverse);
        }
    }
}

TEST(OrbitalEnergy, PropertyConservedAlongFixedStanceTrajectory)
{
    Gen gen(75);
    for (int i = 0; i < 20; ++i) {
        VlipState s = pendulum(gen.uniform(-0.1, 0.1), gen.uniform(-0.6, 0.6), gen.uniform(0.3, 0.6), 4.6);
        const ThrustCommand thrust = ThrustCommand::vertical(gen.uniform(0.0, 0.6) * s.mass * s.gravity);
        const double g_eff = effective_gravity(s.mass, thrust.force.z(), s.gravity);
        Eigen::VectorXd x(6);
        x << s.position, s.velocity;
        auto f = [&](const Eigen::VectorXd& y) {
            VlipState t = s;
            t.position = y.head<3>();
            t.velocity = y.tail<3>();
            Eigen::VectorXd d(6);
            d << y.tail<3>(), vlip_dynamics(t, height_hold_input(t, thrust), thrust).acceleration;
            return d;
        };
        const double e0 = orbital_energy(x[0], x[3], s.z0, g_eff).energy;
        double worst = 0.0;
        for (int k = 0; k < 4000; ++k) {
            x = math::rk4_step(f, x, 1e-4);
            worst = std::max(worst, std::abs(orbital_energy(x[0], x[3], s.z0, g_eff).energy - e0));
        }
        EXPECT_LE(worst, 1e-8);
    }
}

TEST(CapturePoint, Examples)
{
    const double m = 4.6;
    EXPECT_EQ(capture_point(0.0, 0.5, m, 0.0, 9.81), 0.0);
    const double plain = capture_point(0.5, 0.5, m, 0.0, 9.81);
    const double buoyant = capture_point(0.5, 0.5, m, 0.5 * m * 9.81, 9.81);
    EXPECT_NEAR(plain, 0.11288, 5e-6);
    EXPECT_NEAR(buoyant, 0.15964, 5e-6);
    EXPECT_NEAR(plain, 0.5 * std::sqrt(0.5 / 9.81), 1e-15);
    EXPECT_NEAR(buoyant, 0.5 * std::sqrt(0.5 / 4.905), 1e-15);
    // After stepping onto the capture point the CoM sits x_cp behind the new foot.
    EXPECT_NEAR(orbital_energy(-buoyant, 0.5, 0.5, 4.905).energy, 0.0, 1e-12);
    EXPECT_NEAR(orbital_energy(-plain, 0.5, 0.5, 9.81).energy, 0.0, 1e-12);
    EXPECT_THROW(capture_point(0.5, 0.5, m, m * 9.81, 9.81), InvalidThrust);
}

TEST(CapturePoint, PropertyStrictlyIncreasingInThrustAndSpeed)
{
    Gen gen(76);
    for (int i = 0; i < 200; ++i) {
        const double m = gen.uniform(1.0, 20.0);
        const double v = gen.uniform(0.01, 2.0);
        const double z0 = gen.uniform(0.2, 1.0);
        double previous = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double x = capture_point(v, z0, m, 0.045 * k * m * 9.81, 9.81);
            EXPECT_GT(x, previous);
            previous = x;
        }
        EXPECT_GT(capture_point(v + 0.1, z0, m, 0.0, 9.81), capture_point(v, z0, m, 0.0, 9.81));
    }
    double previous = 0.0;
    for (double fraction : {0.0, 0.25, 0.5}) {
        const double x = capture_point(0.5, 0.5, 4.6, fraction * 4.6 * 9.81, 9.81);
        EXPECT_GT(x, previous);
        previous = x;
    }
}

TEST(CapturePoint, PropertyRestWithinFiveTimeConstants)
{
    // Placing the stance at the capture offset puts the state on the stable
    // eigenvector; the norm then decays exactly as e^{-t/τ}.
    for (double fraction : {0.0, 0.5}) {
        const double m = 4.6, z0 = 0.5, g = 9.81;
        const double thrust = fraction * m * g;
        const double x_cp = capture_point(0.5, z0, m, thrust, g);
        const double omega = std::sqrt(effective_gravity(m, thrust, g) / z0);
        const double tau = 1.0 / omega;
        Eigen::VectorXd x(2);
        x << -x_cp, 0.5;
        auto f = [&](const Eigen::VectorXd& y) {
            Eigen::VectorXd d(2);
            d << y[1], omega * omega * y[0];
            return d;
        };
        const double n0 = x.norm();
        const double dt = 1e-4;
        const int steps = static_cast<int>(std::lround(5.0 * tau / dt));
        for (int k = 0; k < steps; ++k) {
            x = math::rk4_step(f, x, dt);
        }
        EXPECT_NEAR(x.norm(), n0 * std::exp(-steps * dt / tau), 1e-6);
        EXPECT_LT(std::abs(x[1]), 0.5 * 0.01);
    }
}

GaitConfig loose_gait()
{
    GaitConfig g;
    g.z0 = 0.5;
    g.desired_speed = 0.0;
    g.max_step_length = 1.0;
    return g;
}

TEST(PlanStep, AtRestOnlyTheStepWidthOffset)
{
    VlipState s = pendulum(0.0, 0.0, 0.5, 4.6);
    s.position.y() = s.cop.y() = 0.12;
    const CapturePlan plan = plan_step(s, ThrustCommand{}, loose_gait(), Side::right, 0.0);
    EXPECT_EQ(plan.sagittal.step, 0.0);
    EXPECT_EQ(plan.target.x(), 0.0);
    EXPECT_LT(plan.frontal.step, 0.0);
    EXPECT_NEAR(plan.frontal.step, plan.frontal.bias, 1e-15);
    EXPECT_NEAR(plan.frontal.bias, -0.24 / (1.0 + std::exp(plan.omega * 0.4)), 1e-15);
    EXPECT_FALSE(plan.clamped);
    EXPECT_FALSE(plan.step_due);
}

TEST(PlanStep, PushOffsetsMatchCapturePoint)
{
    const VlipState s = pendulum(0.0, 0.5, 0.5, 4.6);
    const CapturePlan plain = plan_step(s, ThrustCommand{}, loose_gait(), Side::right, 0.0);
    EXPECT_NEAR(plain.sagittal.step, 0.11288, 5e-6);
    EXPECT_NEAR(plain.target.x(), capture_point(0.5, 0.5, 4.6, 0.0, 9.81), 1e-15);
    const CapturePlan buoyant =
        plan_step(s, ThrustCommand::vertical(0.5 * 4.6 * 9.81), loose_gait(), Side::right, 0.0);
    EXPECT_NEAR(buoyant.sagittal.step, 0.15964, 5e-6);
    EXPECT_NEAR(buoyant.g_eff, 4.905, 1e-12);
}

TEST(PlanStep, ThrustReducesPostStepResidualEnergy)
{
    // Same push, same step-length saturation; the CoM evolves one step
    // period about the current foot before stepping.
    for (double push : {0.3, 0.5, 0.8, 1.2}) {
        GaitConfig gait = loose_gait();
        gait.max_step_length = 0.15;
        double residual[2];
        for (int k = 0; k < 2; ++k) {
            const double thrust = 0.5 * k * 4.6 * 9.81;
            const double omega = std::sqrt(effective_gravity(4.6, thrust, 9.81) / gait.z0);
            const LipPrediction pred = predict_lip(Eigen::Vector2d::Zero(), Eigen::Vector2d(push, 0.0), omega,
                                                   gait.step_period);
            VlipState s = pendulum(pred.position.x(), pred.velocity.x(), gait.z0, 4.6);
            const CapturePlan plan = plan_step(s, ThrustCommand::vertical(thrust), gait, Side::right, gait.step_period);
            residual[k] = std::abs(orbital_energy(s.position.x() - plan.target.x(), s.velocity.x(), gait.z0,
                                                  plan.g_eff).energy);
        }
        EXPECT_LE(residual[1], residual[0]) << "push " << push;
    }
}

TEST(PlanStep, ClampsToReachAndFlags)
{
    GaitConfig gait = loose_gait();
    gait.max_step_length = 0.05;
    const CapturePlan plan = plan_step(pendulum(0.0, 0.5, 0.5, 4.6), ThrustCommand{}, gait, Side::right, 0.0);
    EXPECT_TRUE(plan.clamped);
    EXPECT_TRUE(plan.sagittal.clamped);
    EXPECT_EQ(plan.sagittal.step, 0.05);
}

TEST(PlanStep, KeepsMinimumFootSeparation)
{
    GaitConfig gait = loose_gait();
    gait.min_foot_separation = 0.1;
    VlipState s = pendulum(0.0, 0.0, 0.5, 4.6);
    s.velocity.y() = 1.0;  // drifting toward the swing (right) side would cross over
    s.cop.y() = 0.0;
    const CapturePlan plan = plan_step(s, ThrustCommand{}, gait, Side::right, 0.0);
    EXPECT_LE(plan.target.y(), s.cop.y() - 0.1 + 1e-15);
    EXPECT_TRUE(plan.frontal.clamped);
}

TEST(PlanStep, StepTriggers)
{
    const GaitConfig gait = loose_gait();
    const VlipState calm = pendulum(0.0, 0.1, 0.5, 4.6);
    EXPECT_FALSE(plan_step(calm, ThrustCommand{}, gait, Side::right, 0.2).step_due);
    const CapturePlan timer = plan_step(calm, ThrustCommand{}, gait, Side::right, gait.step_period);
    EXPECT_TRUE(timer.step_due);
    EXPECT_FALSE(timer.early);

    const VlipState fast = pendulum(0.0, 1.5, 0.5, 4.6);  // E = 1.125 > 0.5
    EXPECT_FALSE(plan_step(fast, ThrustCommand{}, gait, Side::right, 0.1).step_due);
    const CapturePlan early = plan_step(fast, ThrustCommand{}, gait, Side::right, 0.2);
    EXPECT_TRUE(early.step_due);
    EXPECT_TRUE(early.early);
}

TEST(PlanStep, ForwardSpeedBias)
{
    GaitConfig gait = loose_gait();
    gait.desired_speed = 0.2;
    const CapturePlan plan = plan_step(pendulum(0.0, 0.2, 0.5, 4.6), ThrustCommand{}, gait, Side::right, 0.0);
    const double growth = std::exp(plan.omega * gait.step_period);
    EXPECT_NEAR(plan.sagittal.bias, -0.2 * gait.step_period / (growth - 1.0), 1e-15);
    // Periodic gait: stepping at this offset reproduces the same speed one period later.
    const double x0 = -plan.sagittal.step;
    const LipPrediction next =
        predict_lip(Eigen::Vector2d(x0, 0.0), Eigen::Vector2d(0.2, 0.0), plan.omega, gait.step_period);
    EXPECT_GT(next.velocity.x(), 0.0);
}

TEST(GaitConfig, Validation)
{
    GaitConfig g;
    EXPECT_NO_THROW(g.validate());
    g.thrust_fraction = 1.2;
    try {
        g.validate();
        FAIL() << "thrust fraction 1.2 accepted";
    } catch (const InvalidGaitConfig& e) {
        EXPECT_EQ(e.key(), "thrust_fraction");
        EXPECT_NE(std::string(e.what()).find("g'"), std::string::npos);
    }
    g = GaitConfig();
    g.min_stance_time = 1.0;
    EXPECT_THROW(g.validate(), InvalidGaitConfig);
    EXPECT_NEAR(GaitConfig().commanded_thrust(4.6, 9.81), 0.5 * 4.6 * 9.81, 1e-12);
}

double simulate_clamped_steps(double push, double omega, double period, double reach, int steps)
{
    // CoM relative to the stance foot, stepping toward the capture point every period.
    double x = 0.0;
    double v = push;
    for (int k = 0; k < steps; ++k) {
        const LipPrediction p = predict_lip(Eigen::Vector2d(x, 0.0), Eigen::Vector2d(v, 0.0), omega, period);
        x = -std::clamp(p.velocity.x() / omega, -reach, reach);
        v = p.velocity.x();
    }
    return x + v / omega;
}

TEST(CapturablePush, MatchesRepeatedClampedSteps)
{
    for (double fraction : {0.0, 0.25, 0.5}) {
        const double omega = std::sqrt(9.81 * (1.0 - fraction) / 0.4);
        const double v_max = capturable_push_speed(omega, 0.4, 0.2);
        EXPECT_LT(std::abs(simulate_clamped_steps(0.999 * v_max, omega, 0.4, 0.2, 60)), 0.2);
        EXPECT_GT(std::abs(simulate_clamped_steps(1.001 * v_max, omega, 0.4, 0.2, 60)), 1.0);
    }
}

TEST(Scheduler, InitialPhase)
{
    GaitScheduler s(SchedulerConfig{});
    const GaitPhase p = s.update(0.0, true, false);
    EXPECT_EQ(p.stance, Side::left);
    EXPECT_EQ(p.swing, Side::right);
    EXPECT_EQ(p.phase, 0.0);
    EXPECT_FALSE(p.step_event);
}

TEST(Scheduler, TouchdownAfterPeriodToggles)
{
    GaitScheduler s(SchedulerConfig{});
    EXPECT_NEAR(s.update(0.2, true, false).phase, 0.5, 1e-12);
    const GaitPhase p = s.update(0.4, true, true);
    EXPECT_TRUE(p.step_event);
    EXPECT_EQ(p.stance, Side::right);
    EXPECT_EQ(p.steps, 1);
    EXPECT_FALSE(s.update(0.401, true, true).step_event);
}

TEST(Scheduler, ChatterWithinDebounceGivesOneEvent)
{
    GaitScheduler s(SchedulerConfig{});
    s.update(0.0, true, false);
    int events = 0;
    const bool chatter[] = {true, false, true, true, false, true, false, true, true, true};
    for (int i = 0; i < 10; ++i) {
        events += s.update(0.4 + 0.001 * i, true, chatter[i]).step_event ? 1 : 0;
    }
    EXPECT_EQ(events, 1);
    EXPECT_EQ(s.current().stance, Side::right);
}

TEST(Scheduler, AirborneFaultAfterGrace)
{
    GaitScheduler s(SchedulerConfig{});
    s.update(0.0, true, false);
    EXPECT_FALSE(s.update(0.1, false, false).airborne_fault);
    EXPECT_FALSE(s.update(0.25, false, false).airborne_fault);
    EXPECT_TRUE(s.update(0.31, false, false).airborne_fault);
    EXPECT_FALSE(s.update(0.32, true, false).airborne_fault);
}

TEST(Scheduler, RejectsBackwardClock)
{
    GaitScheduler s(SchedulerConfig{});
    s.update(1.0, true, false);
    EXPECT_THROW(s.update(0.5, true, false), std::invalid_argument);
}

}  // namespace
}  // namespace harpy::vlip
