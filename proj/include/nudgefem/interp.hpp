#pragma once

#include <functional>

#include "nudgefem/operators.hpp"

namespace nudgefem {

enum class InterpVariant {
    quadratic_on_coarse,  // degree-2 Lagrange on the coarse mesh
    linear_on_refined,    // degree-1 Lagrange on the once-refined coarse mesh
};

/** Coarse-observation operator: sample a fine-mesh P2 field at the coarse
 *  nodes (six per coarse triangle under either variant, the equal-data
 *  pairing) and re-express the Lagrange interpolant on the fine mesh. The
 *  matrix acts on stacked (x block, y block) velocity coefficients; nesting
 *  makes it idempotent because the interpolant range embeds exactly in the
 *  fine P2 space. */
struct InterpOperator {
    int k = 1;
    int coarse_level = 0;  // hierarchy index
    int fine_level = 0;
    InterpVariant variant = InterpVariant::linear_on_refined;
    std::vector<Vec2> sample_nodes;  // observation sites, one per sampled scalar dof
    SpMat matrix;                     // fine n_total x fine n_total
};

InterpOperator build_interp(const MeshHierarchy& hierarchy, int coarse_level,
                            int fine_level, int k, InterpVariant variant);

FeField apply(const InterpOperator& op, const FeField& field);

// dump the sparse operator as "row col value" lines
void export_triples(const InterpOperator& op, const std::string& path);

struct InterpRateReport {
    double rate = 0.0;                    // least-squares slope in log-log
    double constant = 0.0;                // exp of the fitted intercept
    std::vector<double> H;                // coarse mesh sizes
    std::vector<double> errors;           // per-level interpolation errors
    std::vector<double> level_constants;  // error / H^(k+1-m)
    bool exact_reproduction = false;      // all errors at round-off scale
};

// interpolation error rate of the degree-k operator against a closed form:
// for each coarse level the finest mesh holds the interpolant, the error is
// measured with the high-order quadrature oracle, and the slope of
// log(error) vs log(H) is fitted; m = 0 for L2, m = 1 for the H1 seminorm
InterpRateReport measure_interp_rate(const MeshHierarchy& hierarchy, int k,
                                     const std::function<double(Vec2)>& phi,
                                     const std::function<std::array<double, 2>(Vec2)>& grad_phi,
                                     int m);

}  // namespace nudgefem
