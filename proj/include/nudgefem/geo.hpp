#pragma once

#include <cmath>
#include <vector>

namespace nudgefem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

// twice the signed area of triangle abc; > 0 for counterclockwise order
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// > 0 when d lies strictly inside the circumcircle of ccw triangle abc.
// Plain double evaluation; callers treat values within a small epsilon of
// zero (cocircular points) as outside, which keeps insertion cavities
// star-shaped for the regular point layouts produced by the generators.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// shoelace area of a simple polygon, positive for ccw vertex order
double polygon_area(const std::vector<Vec2>& poly);

// even-odd crossing test, boundary points unspecified
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// distance from p to the nearest point of the polygon outline
double dist_to_polygon(const Vec2& p, const std::vector<Vec2>& poly);

// regular n-gon inscribed in the circle of radius r about (cx, cy),
// first vertex at angle 0, ccw order
std::vector<Vec2> regular_polygon(int n, double r, double cx = 0.0, double cy = 0.0);

}  // namespace nudgefem
