#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fleet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (b - a).norm(); }

/// Bearing of the vector a->b in radians, in (-pi, pi].
inline double bearing(const Vec2& a, const Vec2& b) { return std::atan2(b.y - a.y, b.x - a.x); }

/// Wraps an angle into [0, 2*pi).
inline double mod_two_pi(double theta) {
    constexpr double two_pi = 2.0 * M_PI;
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double theta) {
    double r = mod_two_pi(theta);
    return r > M_PI ? r - 2.0 * M_PI : r;
}

struct Pose {
    Vec2 position;
    double heading = 0.0;  // rad
};

/// Axis-aligned rectangle, min corner + extents.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool contains(const Vec2& p) const {
        return p.x >= x && p.x <= x + w && p.y >= y && p.y <= y + h;
    }
};

/// Parameter interval [t0, t1] of segment a+(b-a)*t clipped to a rectangle,
/// empty (t0 > t1) if the segment misses it. Liang-Barsky.
struct ClipInterval {
    double t0 = 1.0;
    double t1 = 0.0;
    bool empty() const { return t0 > t1; }
};

ClipInterval clip_segment(const Vec2& a, const Vec2& b, const Rect& r);

}  // namespace fleet
