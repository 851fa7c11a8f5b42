#include "nudgefem/geo.hpp"

#include <algorithm>

namespace nudgefem {

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    // 3x3 determinant of the lifted points relative to d
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2)
         - ady * (bdx * cd2 - cdx * bd2)
         + ad2 * (bdx * cdy - cdx * bdy);
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        s += cross(p, q);
    }
    return 0.5 * s;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xin = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xin) inside = !inside;
        }
    }
    return inside;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    return norm(p - q);
}

double dist_to_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        d = std::min(d, dist_point_segment(p, poly[i], poly[(i + 1) % n]));
    }
    return d;
}

std::vector<Vec2> regular_polygon(int n, double r, double cx, double cy) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double a = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        pts.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    return pts;
}

}  // namespace nudgefem
