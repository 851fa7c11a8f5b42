#include "nudgefem/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace nudgefem {

namespace {

// cocircular points (same-ring layouts) produce incircle values at round-off
// scale; anything this close to zero counts as outside the circumcircle
constexpr double kIncircleEps = 1e-12;

struct BWTriangulation {
    std::vector<Vec2> pts;
    std::vector<std::array<int, 3>> tris;  // ccw
};

void insert_point(BWTriangulation& T, int pi) {
    const Vec2& p = T.pts[static_cast<std::size_t>(pi)];

    // cavity: triangles whose circumcircle strictly contains p
    std::vector<std::size_t> cavity;
    for (std::size_t ti = 0; ti < T.tris.size(); ++ti) {
        const auto& t = T.tris[ti];
        if (incircle(T.pts[static_cast<std::size_t>(t[0])],
                     T.pts[static_cast<std::size_t>(t[1])],
                     T.pts[static_cast<std::size_t>(t[2])], p) > kIncircleEps) {
            cavity.push_back(ti);
        }
    }
    if (cavity.empty()) {
        throw std::runtime_error("delaunay: point not inside any circumcircle");
    }

    // cavity boundary = directed edges appearing exactly once
    std::map<std::array<int, 2>, int> count;
    for (const std::size_t ti : cavity) {
        const auto& t = T.tris[ti];
        for (int i = 0; i < 3; ++i) {
            int a = t[i], b = t[(i + 1) % 3];
            std::array<int, 2> key{std::min(a, b), std::max(a, b)};
            ++count[key];
        }
    }
    std::vector<std::array<int, 2>> boundary;  // directed ccw as seen from cavity
    for (const std::size_t ti : cavity) {
        const auto& t = T.tris[ti];
        for (int i = 0; i < 3; ++i) {
            const int a = t[i], b = t[(i + 1) % 3];
            if (count.at({std::min(a, b), std::max(a, b)}) == 1) {
                boundary.push_back({a, b});
            }
        }
    }

    std::sort(cavity.rbegin(), cavity.rend());
    for (const std::size_t ti : cavity) {
        T.tris.erase(T.tris.begin() + static_cast<std::ptrdiff_t>(ti));
    }
    for (const auto& [a, b] : boundary) {
        T.tris.push_back({a, b, pi});
    }
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    // proper crossing of open segments
    const double d1 = orient2d(c, d, a);
    const double d2 = orient2d(c, d, b);
    const double d3 = orient2d(a, b, c);
    const double d4 = orient2d(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool has_edge(const BWTriangulation& T, int a, int b) {
    for (const auto& t : T.tris) {
        for (int i = 0; i < 3; ++i) {
            const int u = t[i], v = t[(i + 1) % 3];
            if ((u == a && v == b) || (u == b && v == a)) return true;
        }
    }
    return false;
}

// flip edges crossing segment (a, b) until the segment appears; the point
// layouts used here contain all loop edges naturally, so this is a safety
// net rather than a hot path
void recover_segment(BWTriangulation& T, int a, int b) {
    const int max_rounds = 1000;
    for (int round = 0; round < max_rounds; ++round) {
        if (has_edge(T, a, b)) return;
        bool flipped = false;
        for (std::size_t ti = 0; ti < T.tris.size() && !flipped; ++ti) {
            const auto t = T.tris[ti];
            for (int i = 0; i < 3 && !flipped; ++i) {
                const int u = t[i], v = t[(i + 1) % 3];
                if (u == a || u == b || v == a || v == b) continue;
                if (!segments_cross(T.pts[static_cast<std::size_t>(a)],
                                    T.pts[static_cast<std::size_t>(b)],
                                    T.pts[static_cast<std::size_t>(u)],
                                    T.pts[static_cast<std::size_t>(v)])) {
                    continue;
                }
                // find the twin triangle over edge (u, v)
                for (std::size_t tj = 0; tj < T.tris.size(); ++tj) {
                    if (tj == ti) continue;
                    const auto s = T.tris[tj];
                    for (int j = 0; j < 3; ++j) {
                        if (s[j] == v && s[(j + 1) % 3] == u) {
                            const int w = t[(i + 2) % 3];
                            const int x = s[(j + 2) % 3];
                            // flip (u,v) -> (w,x) only when both replacement
                            // triangles stay ccw (the quad is convex)
                            const auto& pw = T.pts[static_cast<std::size_t>(w)];
                            const auto& px = T.pts[static_cast<std::size_t>(x)];
                            const auto& pu = T.pts[static_cast<std::size_t>(u)];
                            const auto& pv = T.pts[static_cast<std::size_t>(v)];
                            if (orient2d(pw, px, pu) < 0 && orient2d(px, pw, pv) < 0) {
                                T.tris[ti] = {u, x, w};
                                T.tris[tj] = {v, w, x};
                                flipped = true;
                            }
                            break;
                        }
                    }
                    if (flipped) break;
                }
            }
        }
        if (!flipped && !has_edge(T, a, b)) {
            throw std::runtime_error("delaunay: failed to recover a boundary segment");
        }
    }
    throw std::runtime_error("delaunay: segment recovery did not terminate");
}

}  // namespace

TriMesh triangulate_two_loop_domain(const std::vector<Vec2>& outer_loop,
                                    const std::vector<Vec2>& inner_loop,
                                    const std::vector<Vec2>& interior) {
    BWTriangulation T;
    const int n_outer = static_cast<int>(outer_loop.size());
    const int n_inner = static_cast<int>(inner_loop.size());
    T.pts = outer_loop;
    T.pts.insert(T.pts.end(), inner_loop.begin(), inner_loop.end());
    T.pts.insert(T.pts.end(), interior.begin(), interior.end());
    const int n_real = static_cast<int>(T.pts.size());

    // super-triangle well clear of the unit-scale domains
    T.pts.emplace_back(-64.0, -64.0);
    T.pts.emplace_back(64.0, -64.0);
    T.pts.emplace_back(0.0, 64.0);
    T.tris.push_back({n_real, n_real + 1, n_real + 2});

    for (int i = 0; i < n_real; ++i) insert_point(T, i);

    // force both polygon loops into the edge set
    for (int j = 0; j < n_outer; ++j) {
        recover_segment(T, j, (j + 1) % n_outer);
    }
    for (int j = 0; j < n_inner; ++j) {
        recover_segment(T, n_outer + j, n_outer + (j + 1) % n_inner);
    }

    // drop super-triangle wings, then carve: keep triangles whose centroid is
    // inside the outer loop and outside the hole
    TriMesh mesh;
    mesh.vertices.assign(T.pts.begin(), T.pts.begin() + n_real);
    for (const auto& t : T.tris) {
        if (t[0] >= n_real || t[1] >= n_real || t[2] >= n_real) continue;
        const Vec2 cen = (T.pts[static_cast<std::size_t>(t[0])] +
                          T.pts[static_cast<std::size_t>(t[1])] +
                          T.pts[static_cast<std::size_t>(t[2])]) * (1.0 / 3.0);
        if (!point_in_polygon(cen, outer_loop)) continue;
        if (point_in_polygon(cen, inner_loop)) continue;
        mesh.triangles.push_back(t);
    }

    mesh.vertex_tag.assign(static_cast<std::size_t>(n_real), BoundaryTag::none);
    for (int j = 0; j < n_outer; ++j) {
        mesh.vertex_tag[static_cast<std::size_t>(j)] = BoundaryTag::outer;
    }
    for (int j = 0; j < n_inner; ++j) {
        mesh.vertex_tag[static_cast<std::size_t>(n_outer + j)] = BoundaryTag::inner;
    }

    build_edges(mesh);
    validate_mesh(mesh);
    return mesh;
}

std::vector<Vec2> graded_ring_points(const std::vector<Vec2>& outer_loop,
                                     const std::vector<Vec2>& inner_loop,
                                     int n_outer, int n_inner,
                                     double r_outer, double r_inner,
                                     const Vec2& hole_center) {
    // target edge lengths at the two boundaries and a power-law blend between
    const double h_in = 2.0 * r_inner * std::sin(M_PI / n_inner);
    const double h_out = 2.0 * r_outer * std::sin(M_PI / n_outer);
    const double alpha = std::log(h_out / h_in) / std::log(r_outer / r_inner);
    const auto h = [&](double d) {
        return std::min(h_out, h_in * std::pow(d / r_inner, alpha));
    };

    // ring spacing, azimuthal stretch, and boundary clearance; calibrated so
    // the (20, 18) annulus yields 126 interior points (164 total vertices)
    const double ring_step = 1.0;
    const double stretch = 1.06;
    const double clearance = 0.5;

    const double d_max = r_outer + norm(hole_center);
    std::vector<Vec2> pts;
    double d = r_inner;
    for (int k = 1;; ++k) {
        d += ring_step * h(d);
        if (d > d_max) break;
        const int n = static_cast<int>(std::floor(2.0 * M_PI * d / (stretch * h(d)) + 0.5));
        const double off = 0.5 * static_cast<double>(k % 2);
        for (int j = 0; j < n; ++j) {
            const double a = 2.0 * M_PI * (static_cast<double>(j) + off) / static_cast<double>(n);
            const Vec2 p{hole_center.x + d * std::cos(a), hole_center.y + d * std::sin(a)};
            const double hp = h(norm(p - hole_center));
            if (!point_in_polygon(p, outer_loop)) continue;
            if (point_in_polygon(p, inner_loop)) continue;
            if (dist_to_polygon(p, outer_loop) < clearance * hp) continue;
            if (dist_to_polygon(p, inner_loop) < clearance * hp) continue;
            pts.push_back(p);
        }
    }
    return pts;
}

namespace {

TriMesh generate_two_circle_domain(int n_outer, int n_inner, double r_outer,
                                   double r_inner, const Vec2& hole_center) {
    if (n_outer < 8) throw std::invalid_argument("mesh generation: n_outer must be >= 8");
    if (n_inner < 6) throw std::invalid_argument("mesh generation: n_inner must be >= 6");
    if (!(0.0 < r_inner && r_inner < r_outer)) {
        throw std::invalid_argument("mesh generation: need 0 < r_inner < r_outer");
    }
    const std::vector<Vec2> outer = regular_polygon(n_outer, r_outer);
    const std::vector<Vec2> inner = regular_polygon(n_inner, r_inner, hole_center.x, hole_center.y);
    const std::vector<Vec2> pts = graded_ring_points(outer, inner, n_outer, n_inner,
                                                     r_outer, r_inner, hole_center);
    return triangulate_two_loop_domain(outer, inner, pts);
}

}  // namespace

TriMesh generate_annulus(int n_outer, int n_inner, double r_outer, double r_inner) {
    return generate_two_circle_domain(n_outer, n_inner, r_outer, r_inner, {0.0, 0.0});
}

TriMesh generate_offset_disk(int n_outer, int n_inner) {
    return generate_two_circle_domain(n_outer, n_inner, 1.0, 0.1, {0.5, 0.0});
}

}  // namespace nudgefem
