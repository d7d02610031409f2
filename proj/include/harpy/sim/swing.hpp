#pragma once

#include "harpy/math/rotation.hpp"

namespace harpy::sim {

using math::Vec3;

struct SwingReference {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();  // d/dt, for the given duration
};

/// C¹ foot path from liftoff to target with zero end velocities. Horizontal
/// motion follows a smoothstep; height adds a bump 16 s²(1−s)² sized so the
/// mid-swing point sits apex_height above the higher endpoint.
/// Phase is clamped to [0, 1].
SwingReference swing_trajectory(double phase, const Vec3& liftoff, const Vec3& target,
                                double apex_height, double duration = 1.0);

}  // namespace harpy::sim
