#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "harpy/math/rotation.hpp"

namespace harpy::math {

/// Raised when a derivative evaluation produces NaN/Inf; the state that
/// triggered it is left untouched so callers can keep a partial log.
class NonFiniteDerivative : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
template <class V>
void require_finite(const V& v, const char* what)
{
    if (!v.allFinite()) {
        throw NonFiniteDerivative(std::string("non-finite derivative in ") + what);
    }
}
}  // namespace detail

/// Classical RK4 step for ẋ = f(x).
template <class F>
Eigen::VectorXd rk4_step(F&& f, const Eigen::VectorXd& x, double dt)
{
    const Eigen::VectorXd k1 = f(x);
    detail::require_finite(k1, "rk4 stage 1");
    const Eigen::VectorXd k2 = f(Eigen::VectorXd(x + 0.5 * dt * k1));
    detail::require_finite(k2, "rk4 stage 2");
    const Eigen::VectorXd k3 = f(Eigen::VectorXd(x + 0.5 * dt * k2));
    detail::require_finite(k3, "rk4 stage 3");
    const Eigen::VectorXd k4 = f(Eigen::VectorXd(x + dt * k3));
    detail::require_finite(k4, "rk4 stage 4");
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// State on SO(3) × Rⁿ: an attitude plus a flat vector of everything else.
struct LieState {
    Rotation3 rotation;
    Eigen::VectorXd rest;
};

/// Derivative of a LieState: Ṙ = R skew(body_rate), rest' = rest_rate.
struct LieDerivative {
    Vec3 body_rate;
    Eigen::VectorXd rest_rate;
};

/// RK4 in the Munthe-Kaas form: the attitude is advanced through the
/// exponential coordinates of the step increment, so every stage and the
/// result stay on SO(3). The vector part follows classical RK4.
template <class F>
LieState rk4_step(F&& f, const LieState& x, double dt)
{
    auto stage = [&](const Vec3& phi, const Eigen::VectorXd& rest) {
        LieState s{x.rotation * exp_so3(phi), rest};
        LieDerivative d = f(s);
        detail::require_finite(d.body_rate, "rk4 attitude stage");
        detail::require_finite(d.rest_rate, "rk4 stage");
        return std::pair<Vec3, Eigen::VectorXd>(right_jacobian_inverse(phi) * d.body_rate,
                                                std::move(d.rest_rate));
    };

    const auto [p1, k1] = stage(Vec3::Zero(), x.rest);
    const auto [p2, k2] = stage(0.5 * dt * p1, x.rest + 0.5 * dt * k1);
    const auto [p3, k3] = stage(0.5 * dt * p2, x.rest + 0.5 * dt * k2);
    const auto [p4, k4] = stage(dt * p3, x.rest + dt * k3);

    const Vec3 phi = dt / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    return LieState{Rotation3::orthonormalized((x.rotation * exp_so3(phi)).matrix()),
                    x.rest + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
}

}  // namespace harpy::math
