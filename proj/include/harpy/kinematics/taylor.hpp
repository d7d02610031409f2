#pragma once

#include <cmath>

namespace harpy::kinematics {

/// Truncated Taylor polynomial x(t) = v + d1·t + d2·t², propagated through
/// the leg chain to get exact first and second directional derivatives.
/// Seeding every joint with (θ, θ̇, 0) yields ṡ = d1 and the velocity-product
/// part of s̈ as 2·d2; seeding one joint with (θ, 1, 0) yields ∂s/∂θ in d1.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
    constexpr Jet(double value, double first, double second) : v(value), d1(first), d2(second) {}

    double first_derivative() const { return d1; }
    double second_derivative() const { return 2.0 * d2; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(const Jet& a, const Jet& b)
{
    return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.v * b.d2 + a.d1 * b.d1 + a.d2 * b.v};
}

inline Jet sin(const Jet& a)
{
    const double s = std::sin(a.v);
    const double c = std::cos(a.v);
    return {s, c * a.d1, c * a.d2 - 0.5 * s * a.d1 * a.d1};
}

inline Jet cos(const Jet& a)
{
    const double s = std::sin(a.v);
    const double c = std::cos(a.v);
    return {c, -s * a.d1, -s * a.d2 - 0.5 * c * a.d1 * a.d1};
}

}  // namespace harpy::kinematics
