#pragma once

#include <functional>

#include <Eigen/Sparse>

#include "nudgefem/quadrature.hpp"
#include "nudgefem/space.hpp"

namespace nudgefem {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct TriGeom {
    Vec2 a;
    double det;          // twice the area, > 0
    double JinvT[2][2];  // maps reference gradients to physical gradients
};

TriGeom tri_geom(const TriMesh& mesh, int t);

// mass matrix; for vector spaces block-diagonal over components
SpMat assemble_mass(const FeSpace& space);

// stiffness (Dirichlet energy) matrix, same block structure
SpMat assemble_stiffness(const FeSpace& space);

// divergence coupling: rows = pressure dofs, cols = velocity dofs,
// entry = (d/dx_c basis_j, pressure basis_i)
SpMat assemble_divergence(const FeSpace& vel_space, const FeSpace& p_space);

// skew-symmetrized convection with the given wind:
// N[i,j] = 1/2 (wind . grad phi_j, phi_i) - 1/2 (wind . grad phi_i, phi_j),
// exactly antisymmetric at matrix level, component-diagonal
SpMat assemble_convection(const FeSpace& vel_space, const FeField& wind);

// same entries as assemble_convection, appended as triplets in a fixed
// deterministic order; lets the step loop rebuild values without reallocating
void convection_triplets(const FeSpace& vel_space, const FeField& wind,
                         std::vector<Triplet>& out);

// integral of each pressure basis function (the zero-mean constraint row)
Eigen::VectorXd pressure_mean_vector(const FeSpace& p_space);

// L2 body-force load vector: F_i = (f, phi_i), f given in closed form
Eigen::VectorXd assemble_load(const FeSpace& vel_space,
                              const std::function<std::array<double, 2>(Vec2)>& f);

struct NormReport {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1 = 0.0;
};

NormReport norms(const FeField& field);

// L2/H1 distance between a discrete field and a closed form, measured with
// the high-order oracle rule (independent of the assembly quadrature)
NormReport error_against(const FeField& field,
                         const std::function<std::array<double, 2>(Vec2)>& exact,
                         const std::function<std::array<double, 4>(Vec2)>& exact_grad);

// scalar closed-form L2 norm over the mesh with the oracle rule
double l2_norm_of(const TriMesh& mesh, const std::function<std::array<double, 2>(Vec2)>& f);

struct DirichletBC {
    std::vector<int> dofs;     // indices into the full system vector
    Eigen::VectorXd values;    // one prescribed value per constrained dof
};

// boundary conditions for a vector velocity space: one closed-form value per
// tag, evaluated at the boundary dof coordinates
DirichletBC velocity_bc(const FeSpace& vel_space,
                        const std::function<std::array<double, 2>(Vec2)>& on_outer,
                        const std::function<std::array<double, 2>(Vec2)>& on_inner);

// row/column elimination in place: constrained rows become identity, column
// couplings move to the right-hand side, sparsity pattern is preserved
// (eliminated entries stay as explicit zeros)
void apply_dirichlet(SpMat& A, Eigen::VectorXd& rhs, const DirichletBC& bc);

}  // namespace nudgefem
