#include "nudgefem/operators.hpp"

#include <stdexcept>

namespace nudgefem {

TriGeom tri_geom(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec2 a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec2 b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec2 c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    TriGeom g;
    g.a = a;
    const double j00 = b.x - a.x, j01 = c.x - a.x;
    const double j10 = b.y - a.y, j11 = c.y - a.y;
    g.det = j00 * j11 - j01 * j10;
    // J^{-T} = (1/det) [[ j11, -j10], [-j01, j00]]
    g.JinvT[0][0] = j11 / g.det;
    g.JinvT[0][1] = -j10 / g.det;
    g.JinvT[1][0] = -j01 / g.det;
    g.JinvT[1][1] = j00 / g.det;
    return g;
}

namespace {

inline Vec2 ref_to_phys(const TriMesh& mesh, int t, double x, double y) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec2 a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec2 b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec2 c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double l0 = 1.0 - x - y;
    return {l0 * a.x + x * b.x + y * c.x, l0 * a.y + x * b.y + y * c.y};
}

// physical gradients of all local shape functions at one quadrature point
void phys_gradients(const TriGeom& g, int degree, double l0, double l1, double l2,
                    double (*out)[2]) {
    double ref[6][2];
    shape_ref_gradients(degree, l0, l1, l2, ref);
    const int n = degree == 1 ? 3 : 6;
    for (int i = 0; i < n; ++i) {
        out[i][0] = g.JinvT[0][0] * ref[i][0] + g.JinvT[0][1] * ref[i][1];
        out[i][1] = g.JinvT[1][0] * ref[i][0] + g.JinvT[1][1] * ref[i][1];
    }
}

SpMat assemble_scalar(const FeSpace& space, bool stiffness) {
    const TriMesh& mesh = *space.mesh;
    const QuadRule& rule = quad_default();
    const int nd = space.dofs_per_cell();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(mesh.n_triangles() * nd * nd));

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        double local[6][6] = {};
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            const double wq = q.w * g.det;
            if (stiffness) {
                double grad[6][2];
                phys_gradients(g, space.degree, l0, q.x, q.y, grad);
                for (int i = 0; i < nd; ++i) {
                    for (int j = 0; j < nd; ++j) {
                        local[i][j] += wq * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                    }
                }
            } else {
                double N[6];
                shape_values(space.degree, l0, q.x, q.y, N);
                for (int i = 0; i < nd; ++i) {
                    for (int j = 0; j < nd; ++j) {
                        local[i][j] += wq * N[i] * N[j];
                    }
                }
            }
        }
        for (int i = 0; i < nd; ++i) {
            for (int j = 0; j < nd; ++j) {
                trips.emplace_back(space.cell_dof(t, i), space.cell_dof(t, j), local[i][j]);
            }
        }
    }

    SpMat M(space.n_scalar, space.n_scalar);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

SpMat expand_components(const SpMat& S, int components, int n_scalar) {
    if (components == 1) return S;
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(S.nonZeros()) * 2);
    for (int k = 0; k < S.outerSize(); ++k) {
        for (SpMat::InnerIterator it(S, k); it; ++it) {
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
            trips.emplace_back(static_cast<int>(it.row()) + n_scalar,
                               static_cast<int>(it.col()) + n_scalar, it.value());
        }
    }
    SpMat A(2 * n_scalar, 2 * n_scalar);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

}  // namespace

SpMat assemble_mass(const FeSpace& space) {
    return expand_components(assemble_scalar(space, false), space.components, space.n_scalar);
}

SpMat assemble_stiffness(const FeSpace& space) {
    return expand_components(assemble_scalar(space, true), space.components, space.n_scalar);
}

SpMat assemble_divergence(const FeSpace& vel_space, const FeSpace& p_space) {
    if (vel_space.mesh != p_space.mesh) {
        throw std::invalid_argument("assemble_divergence: spaces on different meshes");
    }
    if (vel_space.degree != 2 || vel_space.components != 2 || p_space.degree != 1 ||
        p_space.components != 1) {
        throw std::invalid_argument("assemble_divergence: expects P2 vector / P1 scalar pair");
    }
    const TriMesh& mesh = *vel_space.mesh;
    const QuadRule& rule = quad_default();
    const int nv = vel_space.n_scalar;
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 36);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        double local[3][6][2] = {};  // pressure i, velocity j, component c
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            const double wq = q.w * g.det;
            double Np[3];
            shape_values(1, l0, q.x, q.y, Np);
            double grad[6][2];
            phys_gradients(g, 2, l0, q.x, q.y, grad);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 6; ++j) {
                    local[i][j][0] += wq * Np[i] * grad[j][0];
                    local[i][j][1] += wq * Np[i] * grad[j][1];
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            const int gi = p_space.cell_dof(t, i);
            for (int j = 0; j < 6; ++j) {
                const int gj = vel_space.cell_dof(t, j);
                trips.emplace_back(gi, gj, local[i][j][0]);
                trips.emplace_back(gi, gj + nv, local[i][j][1]);
            }
        }
    }

    SpMat B(p_space.n_scalar, vel_space.n_total());
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

void convection_triplets(const FeSpace& vel_space, const FeField& wind,
                         std::vector<Triplet>& out) {
    if (wind.space != &vel_space) {
        throw std::invalid_argument("convection: wind must live on the velocity space");
    }
    const TriMesh& mesh = *vel_space.mesh;
    const QuadRule& rule = quad_default();
    const int nv = vel_space.n_scalar;

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        double local[6][6] = {};
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            const double wq = q.w * g.det;
            double N[6];
            shape_values(2, l0, q.x, q.y, N);
            double grad[6][2];
            phys_gradients(g, 2, l0, q.x, q.y, grad);
            double wx = 0.0, wy = 0.0;
            for (int k = 0; k < 6; ++k) {
                const int gk = vel_space.cell_dof(t, k);
                wx += N[k] * wind.coeffs[gk];
                wy += N[k] * wind.coeffs[gk + nv];
            }
            double adv[6];  // wind . grad phi_k
            for (int k = 0; k < 6; ++k) adv[k] = wx * grad[k][0] + wy * grad[k][1];
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) {
                    local[i][j] += 0.5 * wq * (adv[j] * N[i] - adv[i] * N[j]);
                }
            }
        }
        for (int i = 0; i < 6; ++i) {
            const int gi = vel_space.cell_dof(t, i);
            for (int j = 0; j < 6; ++j) {
                const int gj = vel_space.cell_dof(t, j);
                out.emplace_back(gi, gj, local[i][j]);
                out.emplace_back(gi + nv, gj + nv, local[i][j]);
            }
        }
    }
}

SpMat assemble_convection(const FeSpace& vel_space, const FeField& wind) {
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(vel_space.mesh->n_triangles()) * 72);
    convection_triplets(vel_space, wind, trips);
    SpMat N(vel_space.n_total(), vel_space.n_total());
    N.setFromTriplets(trips.begin(), trips.end());
    return N;
}

Eigen::VectorXd pressure_mean_vector(const FeSpace& p_space) {
    const TriMesh& mesh = *p_space.mesh;
    const QuadRule& rule = quad_default();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p_space.n_scalar);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom geom = tri_geom(mesh, t);
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            double N[3];
            shape_values(1, l0, q.x, q.y, N);
            for (int i = 0; i < 3; ++i) {
                g[p_space.cell_dof(t, i)] += q.w * geom.det * N[i];
            }
        }
    }
    return g;
}

Eigen::VectorXd assemble_load(const FeSpace& vel_space,
                              const std::function<std::array<double, 2>(Vec2)>& f) {
    const TriMesh& mesh = *vel_space.mesh;
    const QuadRule& rule = quad_default();
    const int nv = vel_space.n_scalar;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(vel_space.n_total());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            const Vec2 x = ref_to_phys(mesh, t, q.x, q.y);
            const auto fv = f(x);
            double N[6];
            shape_values(vel_space.degree, l0, q.x, q.y, N);
            const double wq = q.w * g.det;
            for (int i = 0; i < vel_space.dofs_per_cell(); ++i) {
                const int gi = vel_space.cell_dof(t, i);
                F[gi] += wq * N[i] * fv[0];
                F[gi + nv] += wq * N[i] * fv[1];
            }
        }
    }
    return F;
}

NormReport norms(const FeField& field) {
    const FeSpace& s = *field.space;
    const TriMesh& mesh = *s.mesh;
    const QuadRule& rule = quad_default();
    const int nd = s.dofs_per_cell();
    double l2sq = 0.0, h1sq = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            double N[6];
            shape_values(s.degree, l0, q.x, q.y, N);
            double grad[6][2];
            phys_gradients(g, s.degree, l0, q.x, q.y, grad);
            const double wq = q.w * g.det;
            for (int c = 0; c < s.components; ++c) {
                double val = 0.0, gx = 0.0, gy = 0.0;
                for (int i = 0; i < nd; ++i) {
                    const double ci = field.coeffs[c * s.n_scalar + s.cell_dof(t, i)];
                    val += ci * N[i];
                    gx += ci * grad[i][0];
                    gy += ci * grad[i][1];
                }
                l2sq += wq * val * val;
                h1sq += wq * (gx * gx + gy * gy);
            }
        }
    }
    NormReport r;
    r.l2 = std::sqrt(l2sq);
    r.h1_semi = std::sqrt(h1sq);
    r.h1 = std::sqrt(l2sq + h1sq);
    return r;
}

NormReport error_against(const FeField& field,
                         const std::function<std::array<double, 2>(Vec2)>& exact,
                         const std::function<std::array<double, 4>(Vec2)>& exact_grad) {
    const FeSpace& s = *field.space;
    const TriMesh& mesh = *s.mesh;
    const QuadRule& rule = quad_oracle();
    const int nd = s.dofs_per_cell();
    double l2sq = 0.0, h1sq = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        for (const auto& q : rule.points) {
            const double l0 = 1.0 - q.x - q.y;
            const Vec2 x = ref_to_phys(mesh, t, q.x, q.y);
            double N[6];
            shape_values(s.degree, l0, q.x, q.y, N);
            double grad[6][2];
            phys_gradients(g, s.degree, l0, q.x, q.y, grad);
            const auto ev = exact(x);
            // exact_grad returns (du0/dx, du0/dy, du1/dx, du1/dy)
            const auto eg = exact_grad(x);
            const double wq = q.w * g.det;
            for (int c = 0; c < s.components; ++c) {
                double val = 0.0, gx = 0.0, gy = 0.0;
                for (int i = 0; i < nd; ++i) {
                    const double ci = field.coeffs[c * s.n_scalar + s.cell_dof(t, i)];
                    val += ci * N[i];
                    gx += ci * grad[i][0];
                    gy += ci * grad[i][1];
                }
                const double dv = val - ev[static_cast<std::size_t>(c)];
                const double dgx = gx - eg[static_cast<std::size_t>(2 * c)];
                const double dgy = gy - eg[static_cast<std::size_t>(2 * c + 1)];
                l2sq += wq * dv * dv;
                h1sq += wq * (dgx * dgx + dgy * dgy);
            }
        }
    }
    NormReport r;
    r.l2 = std::sqrt(l2sq);
    r.h1_semi = std::sqrt(h1sq);
    r.h1 = std::sqrt(l2sq + h1sq);
    return r;
}

double l2_norm_of(const TriMesh& mesh, const std::function<std::array<double, 2>(Vec2)>& f) {
    const QuadRule& rule = quad_oracle();
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const TriGeom g = tri_geom(mesh, t);
        for (const auto& q : rule.points) {
            const Vec2 x = ref_to_phys(mesh, t, q.x, q.y);
            const auto fv = f(x);
            acc += q.w * g.det * (fv[0] * fv[0] + fv[1] * fv[1]);
        }
    }
    return std::sqrt(acc);
}

DirichletBC velocity_bc(const FeSpace& vel_space,
                        const std::function<std::array<double, 2>(Vec2)>& on_outer,
                        const std::function<std::array<double, 2>(Vec2)>& on_inner) {
    const int nv = vel_space.n_scalar;
    DirichletBC bc;
    std::vector<double> vals;
    for (int d = 0; d < nv; ++d) {
        const BoundaryTag tag = vel_space.dof_tag[static_cast<std::size_t>(d)];
        if (tag == BoundaryTag::none) continue;
        const Vec2 x = vel_space.dof_coords[static_cast<std::size_t>(d)];
        const auto v = (tag == BoundaryTag::outer) ? on_outer(x) : on_inner(x);
        bc.dofs.push_back(d);
        vals.push_back(v[0]);
        bc.dofs.push_back(d + nv);
        vals.push_back(v[1]);
    }
    bc.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return bc;
}

void apply_dirichlet(SpMat& A, Eigen::VectorXd& rhs, const DirichletBC& bc) {
    std::vector<char> constrained(static_cast<std::size_t>(A.rows()), 0);
    std::vector<double> value(static_cast<std::size_t>(A.rows()), 0.0);
    for (std::size_t k = 0; k < bc.dofs.size(); ++k) {
        constrained[static_cast<std::size_t>(bc.dofs[k])] = 1;
        value[static_cast<std::size_t>(bc.dofs[k])] = bc.values[static_cast<Eigen::Index>(k)];
    }
    for (int col = 0; col < A.outerSize(); ++col) {
        const bool col_fixed = constrained[static_cast<std::size_t>(col)] != 0;
        for (SpMat::InnerIterator it(A, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            const bool row_fixed = constrained[static_cast<std::size_t>(row)] != 0;
            if (row_fixed) {
                it.valueRef() = (row == col) ? 1.0 : 0.0;
            } else if (col_fixed) {
                rhs[row] -= it.value() * value[static_cast<std::size_t>(col)];
                it.valueRef() = 0.0;
            }
        }
    }
    for (std::size_t k = 0; k < bc.dofs.size(); ++k) {
        rhs[bc.dofs[k]] = bc.values[static_cast<Eigen::Index>(k)];
    }
}

}  // namespace nudgefem
