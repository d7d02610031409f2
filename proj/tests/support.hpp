#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "harpy/dynamics/dynamics.hpp"
#include "harpy/kinematics/kinematics.hpp"

namespace harpy::test {

using dynamics::FullState;
using kinematics::RobotMorphology;
using kinematics::Side;
using math::Mat3;
using math::Rotation3;
using math::Vec3;

/// Seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    Vec3 vec(double half_width)
    {
        const double x = uniform(-half_width, half_width);
        const double y = uniform(-half_width, half_width);
        return {x, y, uniform(-half_width, half_width)};
    }

    Rotation3 rotation() { return math::exp_so3(vec(1.0).normalized() * uniform(0.0, 3.1)); }

    /// Rotation within max_angle of upright.
    Rotation3 tilt(double max_angle) { return math::exp_so3(vec(1.0).normalized() * uniform(0.0, max_angle)); }

    FullState state()
    {
        FullState s;
        s.rotation = rotation();
        s.position = vec(1.0);
        for (int i = 0; i < 2; ++i) {
            s.hip_frontal[i] = uniform(-0.5, 0.5);
            s.hip_sagittal[i] = uniform(-1.0, 1.0);
            s.knee[i] = uniform(-1.3, 1.3);
            s.hip_frontal_rate[i] = uniform(-2.0, 2.0);
            s.hip_sagittal_rate[i] = uniform(-2.0, 2.0);
            s.knee_rate[i] = uniform(-2.0, 2.0);
        }
        s.body_rate = vec(2.0);
        s.velocity = vec(1.0);
        return s;
    }

    /// Morphology with random offsets, masses and full inertia tensors.
    RobotMorphology morphology()
    {
        RobotMorphology m;
        m.l1_body = vec(0.1);
        m.l2_pelvis = vec(0.05);
        m.l3_hip = vec(0.06);
        m.l4a = uniform(0.05, 0.15);
        m.l4b = uniform(0.2, 0.35);
        m.lt_body = vec(0.15);
        m.m_body = uniform(1.0, 4.0);
        m.m_hip = uniform(0.2, 0.6);
        m.m_knee = uniform(0.2, 0.6);
        m.inertia_body = spd(0.03);
        m.inertia_hip = spd(5e-4);
        m.inertia_knee = spd(5e-4);
        return m;
    }

    Mat3 spd(double scale)
    {
        const Mat3 a = Eigen::Matrix3d::NullaryExpr([&] { return uniform(-1.0, 1.0); });
        return scale * (a * a.transpose() + Mat3::Identity());
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

template <class T>
using M3 = Eigen::Matrix<T, 3, 3>;
template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;
template <class T>
using M4 = Eigen::Matrix<T, 4, 4>;

/// Homogeneous transform helpers for the oracle chain.
template <class T>
M4<T> translation(const V3<T>& d)
{
    M4<T> t = M4<T>::Identity();
    t.template block<3, 1>(0, 3) = d;
    return t;
}

template <class T>
M4<T> rotation4(const M3<T>& r)
{
    M4<T> t = M4<T>::Identity();
    t.template block<3, 3>(0, 0) = r;
    return t;
}

template <class T>
M3<T> rx(const T& a)
{
    using std::cos;
    using std::sin;
    M3<T> r;
    r << T(1), T(0), T(0), T(0), cos(a), -sin(a), T(0), sin(a), cos(a);
    return r;
}

template <class T>
M3<T> ry(const T& a)
{
    using std::cos;
    using std::sin;
    M3<T> r;
    r << cos(a), T(0), sin(a), T(0), T(1), T(0), -sin(a), T(0), cos(a);
    return r;
}

inline Vec3 mirrored(const Vec3& v, Side side) { return side == Side::left ? v : Vec3(v.x(), -v.y(), v.z()); }

/// Positions and orientations of every frame of one leg, composed from 4×4
/// transforms independently of the library.
template <class T>
struct OracleLeg {
    V3<T> pelvis, hip, knee, foot, thruster;
    M3<T> hip_rotation, knee_rotation;
};

template <class T>
OracleLeg<T> oracle_leg(const RobotMorphology& m, const V3<T>& p, const M3<T>& r, const T& gamma,
                        const T& phi_h, const T& phi_k, Side side)
{
    using std::cos;
    using std::sin;
    const double s = side == Side::left ? 1.0 : -1.0;
    auto lift = [](const Vec3& v) { return V3<T>(v.cast<T>()); };
    const M4<T> body = translation<T>(p) * rotation4<T>(r);
    const M4<T> pelvis = body * translation<T>(lift(mirrored(m.l1_body, side))) * rotation4<T>(rx<T>(s * gamma));
    const M4<T> hip = pelvis * translation<T>(lift(mirrored(m.l2_pelvis, side))) * rotation4<T>(ry<T>(phi_h));
    const M4<T> knee = hip * translation<T>(lift(mirrored(m.l3_hip, side))) * rotation4<T>(ry<T>(phi_k));
    const V3<T> l4(-m.l4a * cos(phi_k), T(0), -(m.l4b + m.l4a * sin(phi_k)));
    const M4<T> foot = knee * translation<T>(l4);
    const M4<T> thruster = body * translation<T>(lift(mirrored(m.lt_body, side)));

    OracleLeg<T> out;
    out.pelvis = pelvis.template block<3, 1>(0, 3);
    out.hip = hip.template block<3, 1>(0, 3);
    out.knee = knee.template block<3, 1>(0, 3);
    out.foot = foot.template block<3, 1>(0, 3);
    out.thruster = thruster.template block<3, 1>(0, 3);
    out.hip_rotation = pelvis.template block<3, 3>(0, 0);
    out.knee_rotation = hip.template block<3, 3>(0, 0);
    return out;
}

inline OracleLeg<double> oracle_leg(const RobotMorphology& m, const FullState& s, Side side)
{
    const int i = kinematics::index(side);
    return oracle_leg<double>(m, s.position, s.rotation.matrix(), s.hip_frontal[i],
                              s.hip_sagittal[i], s.knee[i], side);
}

using Complex = std::complex<double>;
inline constexpr double kComplexStep = 1e-30;

/// Every leg frame evaluated at the state advanced by the imaginary step
/// i·h along its own velocity; Im(·)/h is then the exact time derivative.
inline OracleLeg<Complex> oracle_leg_step(const RobotMorphology& m, const FullState& s, Side side)
{
    const int i = kinematics::index(side);
    const Complex ih(0.0, kComplexStep);
    const M3<Complex> r = s.rotation.matrix().cast<Complex>() *
                          (M3<Complex>::Identity() + ih * math::skew(s.body_rate).cast<Complex>());
    const V3<Complex> p = s.position.cast<Complex>() + ih * s.velocity.cast<Complex>();
    return oracle_leg<Complex>(m, p, r, s.hip_frontal[i] + ih * s.hip_frontal_rate[i],
                               s.hip_sagittal[i] + ih * s.hip_sagittal_rate[i],
                               s.knee[i] + ih * s.knee_rate[i], side);
}

template <int R, int C>
Eigen::Matrix<double, R, C> rate(const Eigen::Matrix<Complex, R, C>& x)
{
    return x.imag() / kComplexStep;
}

/// S I S with S = diag(1, ±1, 1).
inline Mat3 mirror_inertia(const Mat3& i, Side side)
{
    const Mat3 s = Vec3(1.0, side == Side::left ? 1.0 : -1.0, 1.0).asDiagonal();
    return s * i * s;
}

/// Kinetic energy Σ ½ m |v|² + ½ ωᵀ Î ω with every velocity obtained by
/// complex-step differentiation of the oracle chain.
inline double oracle_kinetic_energy(const RobotMorphology& m, const FullState& s)
{
    double k = 0.5 * m.m_body * s.velocity.squaredNorm() + 0.5 * s.body_rate.dot(m.inertia_body * s.body_rate);
    for (Side side : {Side::left, Side::right}) {
        const OracleLeg<Complex> l = oracle_leg_step(m, s, side);
        const OracleLeg<double> l0 = oracle_leg(m, s, side);
        const Vec3 v_hip = rate(l.hip);
        const Vec3 v_knee = rate(l.knee);
        const Vec3 w_hip = math::vee(l0.hip_rotation.transpose() * rate(l.hip_rotation));
        const Vec3 w_knee = math::vee(l0.knee_rotation.transpose() * rate(l.knee_rotation));
        k += 0.5 * m.m_hip * v_hip.squaredNorm() +
             0.5 * w_hip.dot(mirror_inertia(m.inertia_hip, side) * w_hip);
        k += 0.5 * m.m_knee * v_knee.squaredNorm() +
             0.5 * w_knee.dot(mirror_inertia(m.inertia_knee, side) * w_knee);
    }
    return k;
}

}  // namespace harpy::test
