#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "nudgefem/mesh.hpp"

namespace nudgefem {

/** Continuous Lagrange space of degree 1 or 2 on a TriMesh, scalar or
 *  2-vector valued. Scalar dofs are numbered vertices first (0..V-1), then
 *  for degree 2 edge midpoints (V..V+E-1) in canonical edge order. Vector
 *  fields store coefficients component-blocked: all x entries, then all y. */
struct FeSpace {
    const TriMesh* mesh = nullptr;
    int degree = 1;
    int components = 1;
    int n_scalar = 0;  // dofs per component

    std::vector<Vec2> dof_coords;         // per scalar dof
    std::vector<BoundaryTag> dof_tag;     // per scalar dof

    int n_total() const { return components * n_scalar; }
    int dofs_per_cell() const { return degree == 1 ? 3 : 6; }

    // global scalar dof for local index i of triangle t; locals 0..2 are the
    // triangle vertices, locals 3..5 the midpoints of edges (01), (12), (20)
    int cell_dof(int t, int i) const;
};

FeSpace build_space(const TriMesh& mesh, int degree, int components);

// boundary scalar dofs of one tag (or both when tag == none)
std::vector<int> boundary_dofs(const FeSpace& space, BoundaryTag tag);

/** Coefficient vector over an FeSpace. */
struct FeField {
    const FeSpace* space = nullptr;
    Eigen::VectorXd coeffs;

    FeField() = default;
    explicit FeField(const FeSpace& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.n_total())) {}
};

// shape values at barycentric point (l0, l1, l2); ordering matches cell_dof:
// for degree 2, entries 0..2 are vertex functions, 3..5 midpoint functions
// on edges (01), (12), (20)
void shape_values(int degree, double l0, double l1, double l2, double* out);

// gradients with respect to (l1, l2) treated as the reference coordinates
void shape_ref_gradients(int degree, double l0, double l1, double l2, double (*out)[2]);

// interpolate a scalar closed-form function onto the space (components == 1)
FeField interpolate_scalar(const FeSpace& space, const std::function<double(Vec2)>& f);

// interpolate a vector closed form (components == 2)
FeField interpolate_vector(const FeSpace& space,
                           const std::function<std::array<double, 2>(Vec2)>& f);

// evaluate a field at a point given by triangle index + barycentric coords;
// returns one value per component
std::array<double, 2> eval_field(const FeField& field, int tri, const std::array<double, 3>& bary);

}  // namespace nudgefem
