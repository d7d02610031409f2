#include "harpy/math/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace harpy::math {

Rotation3::Rotation3(const Mat3& m, double tol) : m_(m)
{
    if (!m.allFinite()) {
        throw NotARotation("rotation matrix has non-finite entries");
    }
    const double err = orthonormality_error();
    const double det = m.determinant();
    if (err > tol || std::abs(det - 1.0) > tol) {
        throw NotARotation("matrix is not in SO(3): |RtR - I| = " + std::to_string(err) +
                           ", det = " + std::to_string(det));
    }
}

Rotation3 Rotation3::orthonormalized(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) = -u.col(2);
    }
    return Rotation3(u * v.transpose(), Unchecked{});
}

Rotation3 Rotation3::operator*(const Rotation3& other) const
{
    return Rotation3(m_ * other.m_, Unchecked{});
}

double Rotation3::orthonormality_error() const
{
    return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Rotation3 rot_x(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 m;
    m << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return Rotation3(m);
}

Rotation3 rot_y(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 m;
    m << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return Rotation3(m);
}

Rotation3 rot_z(double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return Rotation3(m);
}

Mat3 skew(const Vec3& w)
{
    Mat3 s;
    s << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
         -w.y(), w.x(), 0.0;
    return s;
}

Vec3 vee(const Mat3& s)
{
    return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Rotation3 exp_so3(const Vec3& phi)
{
    const double theta = phi.norm();
    const Mat3 k = skew(phi);
    double a;
    double b;
    if (theta < 1e-6) {
        const double t2 = theta * theta;
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Rotation3(Mat3::Identity() + a * k + b * k * k);
}

Vec3 log_so3(const Rotation3& r)
{
    const Mat3& m = r.matrix();
    const double cos_theta = std::clamp((m.trace() - 1.0) * 0.5, -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    if (theta < 1e-6) {
        return 0.5 * vee(m - m.transpose());
    }
    if (M_PI - theta < 1e-6) {
        // Near pi the antisymmetric part vanishes; recover the axis from RRᵀ-symmetric part.
        const Mat3 b = 0.5 * (m + Mat3::Identity());
        int k = 0;
        b.diagonal().maxCoeff(&k);
        Vec3 axis = b.col(k) / std::sqrt(std::max(b(k, k), 1e-300));
        axis.normalize();
        return theta * axis;
    }
    return theta / (2.0 * std::sin(theta)) * vee(m - m.transpose());
}

Mat3 right_jacobian_inverse(const Vec3& phi)
{
    const double theta = phi.norm();
    const Mat3 k = skew(phi);
    double c;
    if (theta < 1e-4) {
        const double t2 = theta * theta;
        c = 1.0 / 12.0 + t2 / 720.0;
    } else {
        c = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
    }
    return Mat3::Identity() + 0.5 * k + c * k * k;
}

Rotation3 integrate_rotation(const Rotation3& r, const Vec3& w_body, double dt)
{
    return Rotation3::orthonormalized(r.matrix() * exp_so3(w_body * dt).matrix());
}

}  // namespace harpy::math
