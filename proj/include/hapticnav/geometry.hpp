#pragma once

#include <cmath>
#include <numbers>

namespace hapticnav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    // z-component of the 3D cross product; positive when o is counter-clockwise of *this.
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps to (-180, 180].
inline double normalize_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    if (r > 180.0) r -= 360.0;
    return r;
}

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

}  // namespace hapticnav
