#include "harpy/dynamics/state.hpp"

namespace harpy::dynamics {

LegJoints FullState::leg(Side s) const
{
    const int i = kinematics::index(s);
    return LegJoints{hip_frontal[i],      hip_sagittal[i],      knee[i],
                     hip_frontal_rate[i], hip_sagittal_rate[i], knee_rate[i]};
}

void FullState::set_leg(Side s, const LegJoints& j)
{
    const int i = kinematics::index(s);
    hip_frontal[i] = j.frontal;
    hip_sagittal[i] = j.sagittal;
    knee[i] = j.knee;
    hip_frontal_rate[i] = j.frontal_rate;
    hip_sagittal_rate[i] = j.sagittal_rate;
    knee_rate[i] = j.knee_rate;
}

Coordinates FullState::q() const
{
    Coordinates q;
    q << position, hip_frontal, hip_sagittal;
    return q;
}

Velocity FullState::v() const
{
    Velocity v;
    v << body_rate, velocity, hip_frontal_rate, hip_sagittal_rate;
    return v;
}

void FullState::set_v(const Velocity& v)
{
    body_rate = v.segment<3>(0);
    velocity = v.segment<3>(3);
    hip_frontal_rate = v.segment<2>(6);
    hip_sagittal_rate = v.segment<2>(8);
}

StateVector FullState::to_vector() const
{
    StateVector x;
    const auto& r = rotation.matrix();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            x[3 * i + j] = r(i, j);
        }
    }
    x.segment<7>(9) = q();
    x.segment<2>(16) = knee;
    x.segment<10>(18) = v();
    x.segment<2>(28) = knee_rate;
    return x;
}

FullState FullState::from_vector(const StateVector& x, double rotation_tol)
{
    math::Mat3 r;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = x[3 * i + j];
        }
    }
    FullState s;
    s.rotation = Rotation3(r, rotation_tol);
    s.position = x.segment<3>(9);
    s.hip_frontal = x.segment<2>(12);
    s.hip_sagittal = x.segment<2>(14);
    s.knee = x.segment<2>(16);
    s.set_v(x.segment<10>(18));
    s.knee_rate = x.segment<2>(28);
    return s;
}

bool FullState::all_finite() const
{
    return to_vector().allFinite();
}

}  // namespace harpy::dynamics
