#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace harpy::math {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Tolerance used by Rotation3 validation and re-orthonormalization checks.
inline constexpr double kOrthonormalTol = 1e-9;

class NotARotation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Body-to-inertial rotation matrix (x = R x^B). Always a member of SO(3).
///
/// Construction from an arbitrary matrix validates orthonormality and
/// det = +1 against a caller-supplied tolerance; use orthonormalized() to
/// project a nearly-orthonormal matrix back onto SO(3).
class Rotation3 {
public:
    Rotation3() : m_(Mat3::Identity()) {}

    explicit Rotation3(const Mat3& m, double tol = kOrthonormalTol);

    static Rotation3 identity() { return Rotation3(); }

    /// Polar-decomposition projection onto SO(3).
    static Rotation3 orthonormalized(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    Mat3 transpose() const { return m_.transpose(); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation3 operator*(const Rotation3& other) const;

    /// ‖RᵀR − I‖_F
    double orthonormality_error() const;

private:
    struct Unchecked {};
    Rotation3(const Mat3& m, Unchecked) : m_(m) {}

    Mat3 m_;
};

Rotation3 rot_x(double angle);
Rotation3 rot_y(double angle);
Rotation3 rot_z(double angle);

/// [w]×, so that skew(w) * v == w.cross(v).
Mat3 skew(const Vec3& w);
Vec3 vee(const Mat3& s);

/// Rodrigues exponential of skew(phi).
Rotation3 exp_so3(const Vec3& phi);
/// Principal logarithm; returns phi with |phi| <= pi.
Vec3 log_so3(const Rotation3& r);

/// Inverse of the right Jacobian of SO(3): if R(t) = R0 exp(phi(t)) and
/// Ṙ = R skew(w), then phi̇ = right_jacobian_inverse(phi) * w.
Mat3 right_jacobian_inverse(const Vec3& phi);

/// Exact step of Ṙ = R skew(w_body) for constant w over dt, re-orthonormalized.
Rotation3 integrate_rotation(const Rotation3& r, const Vec3& w_body, double dt);

}  // namespace harpy::math
