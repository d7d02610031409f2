#include "harpy/kinematics/morphology.hpp"

#include <cmath>

namespace harpy::kinematics {

const char* to_string(Side s)
{
    return s == Side::left ? "left" : "right";
}

namespace {

void check_inertia(const Mat3& inertia, const std::string& key)
{
    if (!inertia.allFinite()) {
        throw InvalidMorphology(key, "non-finite entries");
    }
    if ((inertia - inertia.transpose()).norm() > 1e-12 * (1.0 + inertia.norm())) {
        throw InvalidMorphology(key, "inertia must be symmetric");
    }
    Eigen::LLT<Mat3> llt(inertia);
    if (llt.info() != Eigen::Success) {
        throw InvalidMorphology(key, "inertia must be positive definite");
    }
}

void check_positive(double v, const std::string& key)
{
    if (!(std::isfinite(v) && v > 0.0)) {
        throw InvalidMorphology(key, "must be > 0");
    }
}

void check_finite(const Vec3& v, const std::string& key)
{
    if (!v.allFinite()) {
        throw InvalidMorphology(key, "non-finite entries");
    }
}

}  // namespace

void RobotMorphology::validate() const
{
    check_finite(l1_body, "l1_B");
    check_finite(l2_pelvis, "l2_P");
    check_finite(l3_hip, "l3_H");
    check_finite(lt_body, "lt_B");
    check_positive(l4a, "l4a");
    check_positive(l4b, "l4b");
    check_positive(m_body, "m_B");
    check_positive(m_hip, "m_H");
    check_positive(m_knee, "m_K");
    check_inertia(inertia_body, "I_B");
    check_inertia(inertia_hip, "I_H");
    check_inertia(inertia_knee, "I_K");
    check_positive(gravity, "g");
}

Vec3 sided(const Vec3& left_offset, Side side)
{
    return Vec3(left_offset.x(), mirror_sign(side) * left_offset.y(), left_offset.z());
}

Mat3 sided_inertia(const Mat3& left_inertia, Side side)
{
    if (side == Side::left) {
        return left_inertia;
    }
    const Mat3 s = Vec3(1.0, -1.0, 1.0).asDiagonal();
    return s * left_inertia * s;
}

}  // namespace harpy::kinematics
