#pragma once

#include <vector>

namespace nudgefem {

// quadrature point on the reference triangle (0,0)-(1,0)-(0,1);
// weights include the 1/2 reference area, so sum(w) = 1/2 and
// integral over a physical triangle = sum_i w_i f(x_i) * |det J|
struct QuadPoint {
    double x;
    double y;
    double w;
};

struct QuadRule {
    std::vector<QuadPoint> points;
    int degree;  // highest polynomial degree integrated exactly
};

// 6-point symmetric rule, exact through degree 4
const QuadRule& quad_degree4();

// 12-point symmetric rule, exact through degree 6; the assembly default
const QuadRule& quad_default();

// 25-point collapsed tensor Gauss rule, exact through degree 8; built from
// closed-form Gauss-Legendre nodes, used as an independent oracle in tests
// and for norm measurements against closed-form functions
const QuadRule& quad_oracle();

}  // namespace nudgefem
