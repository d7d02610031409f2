#include "harpy/sim/swing.hpp"

#include <algorithm>
#include <stdexcept>

namespace harpy::sim {

SwingReference swing_trajectory(double phase, const Vec3& liftoff, const Vec3& target,
                                double apex_height, double duration)
{
    if (!(duration > 0.0)) {
        throw std::invalid_argument("swing duration must be > 0");
    }
    const double s = std::clamp(phase, 0.0, 1.0);
    const double blend = s * s * (3.0 - 2.0 * s);
    const double blend_rate = 6.0 * s * (1.0 - s);
    const double bump = 16.0 * s * s * (1.0 - s) * (1.0 - s);
    const double bump_rate = 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s);

    const double top = std::max(liftoff.z(), target.z()) + apex_height;
    const double lift = top - 0.5 * (liftoff.z() + target.z());

    SwingReference ref;
    ref.position = liftoff + blend * (target - liftoff);
    ref.position.z() += lift * bump;
    ref.velocity = blend_rate * (target - liftoff);
    ref.velocity.z() += lift * bump_rate;
    ref.velocity /= duration;
    if (phase <= 0.0 || phase >= 1.0) {
        ref.velocity.setZero();
    }
    return ref;
}

}  // namespace harpy::sim
