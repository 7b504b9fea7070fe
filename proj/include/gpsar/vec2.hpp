#pragma once

#include <cmath>

namespace gpsar {

/// Point or direction in the (x, z) plane; z is elevation, positive up.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; z += o.z; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; z -= o.z; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.z}; }
    friend constexpr Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.z}; }
    friend constexpr Vec2 operator*(const Vec2& a, double s) { return {s * a.x, s * a.z}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.z * b.z; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.z); }

} // namespace gpsar
