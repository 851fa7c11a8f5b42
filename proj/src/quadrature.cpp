#include "nudgefem/quadrature.hpp"

#include <cmath>

namespace nudgefem {

namespace {

// append all distinct permutations of barycentric (l0,l1,l2) with weight w;
// reference coords are (x,y) = (l1,l2); w given in sum-to-one convention
void push_orbit(std::vector<QuadPoint>& pts, double w, double l0, double l1, double l2) {
    const double b[3] = {l0, l1, l2};
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& pm : perms) {
        const double p0 = b[pm[0]], p1 = b[pm[1]], p2 = b[pm[2]];
        bool dup = false;
        for (const auto& q : pts) {
            if (std::abs(q.x - p1) < 1e-15 && std::abs(q.y - p2) < 1e-15 &&
                std::abs(q.w - 0.5 * w) < 1e-15) {
                dup = true;
                break;
            }
        }
        (void)p0;
        if (!dup) pts.push_back({p1, p2, 0.5 * w});
    }
}

QuadRule make_degree4() {
    QuadRule r;
    r.degree = 4;
    push_orbit(r.points, 0.223381589678011, 0.108103018168070, 0.445948490915965, 0.445948490915965);
    push_orbit(r.points, 0.109951743655322, 0.816847572980459, 0.091576213509771, 0.091576213509771);
    return r;
}

QuadRule make_degree6() {
    QuadRule r;
    r.degree = 6;
    push_orbit(r.points, 0.050844906370207, 0.873821971016996, 0.063089014491502, 0.063089014491502);
    push_orbit(r.points, 0.116786275726379, 0.501426509658179, 0.249286745170910, 0.249286745170910);
    push_orbit(r.points, 0.082851075618374, 0.636502499121399, 0.310352451033785, 0.053145049844816);
    return r;
}

QuadRule make_oracle() {
    // 5-point Gauss-Legendre on [-1,1], closed forms
    const double n2 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double n3 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
    const double w1 = 128.0 / 225.0;
    const double w2 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
    const double w3 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
    const double gn[5] = {-n3, -n2, 0.0, n2, n3};
    const double gw[5] = {w3, w2, w1, w2, w3};

    // collapse the square onto the triangle: x = u, y = v(1-u), jacobian (1-u)
    QuadRule r;
    r.degree = 8;
    for (int i = 0; i < 5; ++i) {
        const double u = 0.5 * (gn[i] + 1.0);
        for (int j = 0; j < 5; ++j) {
            const double v = 0.5 * (gn[j] + 1.0);
            r.points.push_back({u, v * (1.0 - u), gw[i] * gw[j] * 0.25 * (1.0 - u)});
        }
    }
    return r;
}

}  // namespace

const QuadRule& quad_degree4() {
    static const QuadRule r = make_degree4();
    return r;
}

const QuadRule& quad_default() {
    static const QuadRule r = make_degree6();
    return r;
}

const QuadRule& quad_oracle() {
    static const QuadRule r = make_oracle();
    return r;
}

}  // namespace nudgefem
