#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cartonsynth {

// Image coordinates: origin top-left, y grows downward.
struct Point2D {
    double x = 0.0;
    double y = 0.0;

    Point2D() = default;
    Point2D(double x_, double y_) : x(x_), y(y_) {}

    Point2D operator+(const Point2D& o) const { return {x + o.x, y + o.y}; }
    Point2D operator-(const Point2D& o) const { return {x - o.x, y - o.y}; }
    Point2D operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2D& o) const = default;
};

inline double dot(const Point2D& a, const Point2D& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2D& a, const Point2D& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Point2D& a, const Point2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double norm(const Point2D& a) { return std::hypot(a.x, a.y); }

// Signed shoelace area. Under the y-down convention a clockwise-on-screen
// polygon has positive signed area.
inline double signed_area(std::span<const Point2D> poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2D& p = poly[i];
        const Point2D& q = poly[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

inline double polygon_area(std::span<const Point2D> poly) { return std::abs(signed_area(poly)); }

// Line a*x + b*y + c = 0 normalized so a^2 + b^2 = 1.
struct LineCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double eval(const Point2D& p) const { return a * p.x + b * p.y + c; }
};

inline double point_line_distance(const LineCoeffs& line, const Point2D& p) {
    return std::abs(line.eval(p));
}

// Intersection of two normalized lines; nullopt when (near) parallel.
inline std::optional<Point2D> intersect(const LineCoeffs& l1, const LineCoeffs& l2) {
    const double det = l1.a * l2.b - l2.a * l1.b;
    if (std::abs(det) < 1e-12) return std::nullopt;
    return Point2D{(l1.b * l2.c - l2.b * l1.c) / det, (l2.a * l1.c - l1.a * l2.c) / det};
}

// Even-odd containment test. Points exactly on an edge are not guaranteed
// either way; callers that care use an explicit tolerance.
inline bool point_in_polygon(const Point2D& p, std::span<const Point2D> poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2D& a = poly[i];
        const Point2D& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

struct BoundingBox {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

inline BoundingBox tight_bounds(std::span<const Point2D> pts) {
    BoundingBox box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

}  // namespace cartonsynth
