#pragma once

#include <array>
#include <cmath>

namespace tpsfem {

/// A point of the (normalized) predictor space.
struct Point2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
    friend bool operator==(Point2 a, Point2 b) { return a.x1 == b.x1 && a.x2 == b.x2; }
};

inline double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point2 a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)}; }

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

/// Axis-aligned rectangle [lo.x1, hi.x1] x [lo.x2, hi.x2].
struct Rect {
    Point2 lo;
    Point2 hi;

    bool contains(Point2 p) const
    {
        return p.x1 >= lo.x1 && p.x1 <= hi.x1 && p.x2 >= lo.x2 && p.x2 <= hi.x2;
    }
    double width() const { return hi.x1 - lo.x1; }
    double height() const { return hi.x2 - lo.x2; }
};

/// Barycentric coordinates of p with respect to triangle (a, b, c).
inline std::array<double, 3> barycentric(Point2 a, Point2 b, Point2 c, Point2 p)
{
    const double det = orient(a, b, c);
    const double l1 = orient(p, b, c) / det;
    const double l2 = orient(a, p, c) / det;
    return {l1, l2, 1.0 - l1 - l2};
}

} // namespace tpsfem
