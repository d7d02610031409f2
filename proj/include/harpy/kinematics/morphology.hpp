#pragma once

#include <stdexcept>
#include <string>

#include "harpy/math/rotation.hpp"

namespace harpy::kinematics {

using math::Mat3;
using math::Vec3;

enum class Side { left = 0, right = 1 };

inline constexpr Side other(Side s) { return s == Side::left ? Side::right : Side::left; }
inline constexpr int index(Side s) { return static_cast<int>(s); }
/// +1 for the left leg, -1 for the right (frontal-angle and y-offset mirroring).
inline constexpr double mirror_sign(Side s) { return s == Side::left ? 1.0 : -1.0; }
const char* to_string(Side s);

class InvalidMorphology : public std::invalid_argument {
public:
    InvalidMorphology(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Robot constants. Offsets are given for the LEFT leg in their local frames;
/// the right leg negates the y-components of every offset and the sign of
/// its frontal hip angle, so a mirrored configuration mirrors every point.
///
/// The numbers below are implementer defaults, not measured hardware values.
struct RobotMorphology {
    Vec3 l1_body{0.0, 0.075, -0.06};   // body CoM -> pelvis (frontal hip joint)
    Vec3 l2_pelvis{0.0, 0.03, -0.03};  // pelvis -> hip motor CoM
    Vec3 l3_hip{0.0, 0.015, -0.05};    // hip -> knee motor CoM
    double l4a = 0.12;                 // lower-leg crank
    double l4b = 0.30;                 // lower-leg link
    Vec3 lt_body{0.0, 0.14, 0.0};      // body CoM -> thruster

    double m_body = 3.0;
    double m_hip = 0.45;
    double m_knee = 0.35;
    Mat3 inertia_body = Vec3(0.030, 0.025, 0.020).asDiagonal();
    Mat3 inertia_hip = Vec3(4e-4, 4e-4, 3e-4).asDiagonal();
    Mat3 inertia_knee = Vec3(3e-4, 3e-4, 2e-4).asDiagonal();

    double gravity = 9.81;

    double total_mass() const { return m_body + 2.0 * (m_hip + m_knee); }

    /// Throws InvalidMorphology naming the offending field.
    void validate() const;
};

/// Offset expressed for the requested side (y mirrored for the right leg).
Vec3 sided(const Vec3& left_offset, Side side);
/// Inertia expressed for the requested side: S I S with S = diag(1,-1,1).
Mat3 sided_inertia(const Mat3& left_inertia, Side side);

}  // namespace harpy::kinematics
