#include "nudgefem/space.hpp"

#include <stdexcept>

namespace nudgefem {

int FeSpace::cell_dof(int t, int i) const {
    const auto& tri = mesh->triangles[static_cast<std::size_t>(t)];
    if (i < 3) return tri[i];
    // midpoint locals: 3 -> edge (01) which is opposite vertex 2, etc.
    static constexpr int opposite[3] = {2, 0, 1};
    const int e = mesh->tri_edges[static_cast<std::size_t>(t)][opposite[i - 3]];
    return mesh->n_vertices() + e;
}

FeSpace build_space(const TriMesh& mesh, int degree, int components) {
    if (degree != 1 && degree != 2) {
        throw std::invalid_argument("build_space: degree must be 1 or 2");
    }
    if (components != 1 && components != 2) {
        throw std::invalid_argument("build_space: components must be 1 or 2");
    }
    FeSpace s;
    s.mesh = &mesh;
    s.degree = degree;
    s.components = components;
    s.n_scalar = mesh.n_vertices() + (degree == 2 ? mesh.n_edges() : 0);

    s.dof_coords.reserve(static_cast<std::size_t>(s.n_scalar));
    s.dof_tag.reserve(static_cast<std::size_t>(s.n_scalar));
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        s.dof_coords.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
        s.dof_tag.push_back(mesh.vertex_tag[static_cast<std::size_t>(v)]);
    }
    if (degree == 2) {
        // a midpoint dof is boundary exactly when its edge is boundary
        for (int e = 0; e < mesh.n_edges(); ++e) {
            const Vec2 a = mesh.vertices[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)][0])];
            const Vec2 b = mesh.vertices[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)][1])];
            s.dof_coords.emplace_back(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            s.dof_tag.push_back(mesh.edge_tag[static_cast<std::size_t>(e)]);
        }
    }
    return s;
}

std::vector<int> boundary_dofs(const FeSpace& space, BoundaryTag tag) {
    std::vector<int> out;
    for (int d = 0; d < space.n_scalar; ++d) {
        const BoundaryTag t = space.dof_tag[static_cast<std::size_t>(d)];
        if (t == BoundaryTag::none) continue;
        if (tag == BoundaryTag::none || t == tag) out.push_back(d);
    }
    return out;
}

void shape_values(int degree, double l0, double l1, double l2, double* out) {
    if (degree == 1) {
        out[0] = l0;
        out[1] = l1;
        out[2] = l2;
        return;
    }
    out[0] = l0 * (2.0 * l0 - 1.0);
    out[1] = l1 * (2.0 * l1 - 1.0);
    out[2] = l2 * (2.0 * l2 - 1.0);
    out[3] = 4.0 * l0 * l1;
    out[4] = 4.0 * l1 * l2;
    out[5] = 4.0 * l2 * l0;
}

void shape_ref_gradients(int degree, double l0, double l1, double l2, double (*out)[2]) {
    // reference coordinates are (x, y) = (l1, l2); dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1)
    if (degree == 1) {
        out[0][0] = -1.0; out[0][1] = -1.0;
        out[1][0] = 1.0;  out[1][1] = 0.0;
        out[2][0] = 0.0;  out[2][1] = 1.0;
        return;
    }
    const double g0 = 4.0 * l0 - 1.0;
    const double g1 = 4.0 * l1 - 1.0;
    const double g2 = 4.0 * l2 - 1.0;
    out[0][0] = -g0;                 out[0][1] = -g0;
    out[1][0] = g1;                  out[1][1] = 0.0;
    out[2][0] = 0.0;                 out[2][1] = g2;
    out[3][0] = 4.0 * (l0 - l1);     out[3][1] = -4.0 * l1;
    out[4][0] = 4.0 * l2;            out[4][1] = 4.0 * l1;
    out[5][0] = -4.0 * l2;           out[5][1] = 4.0 * (l0 - l2);
}

FeField interpolate_scalar(const FeSpace& space, const std::function<double(Vec2)>& f) {
    if (space.components != 1) {
        throw std::invalid_argument("interpolate_scalar: vector space given");
    }
    FeField field(space);
    for (int d = 0; d < space.n_scalar; ++d) {
        field.coeffs[d] = f(space.dof_coords[static_cast<std::size_t>(d)]);
    }
    return field;
}

FeField interpolate_vector(const FeSpace& space,
                           const std::function<std::array<double, 2>(Vec2)>& f) {
    if (space.components != 2) {
        throw std::invalid_argument("interpolate_vector: scalar space given");
    }
    FeField field(space);
    for (int d = 0; d < space.n_scalar; ++d) {
        const auto v = f(space.dof_coords[static_cast<std::size_t>(d)]);
        field.coeffs[d] = v[0];
        field.coeffs[space.n_scalar + d] = v[1];
    }
    return field;
}

std::array<double, 2> eval_field(const FeField& field, int tri, const std::array<double, 3>& bary) {
    const FeSpace& s = *field.space;
    double N[6];
    shape_values(s.degree, bary[0], bary[1], bary[2], N);
    std::array<double, 2> out{0.0, 0.0};
    for (int i = 0; i < s.dofs_per_cell(); ++i) {
        const int g = s.cell_dof(tri, i);
        for (int c = 0; c < s.components; ++c) {
            out[static_cast<std::size_t>(c)] += N[i] * field.coeffs[c * s.n_scalar + g];
        }
    }
    return out;
}

}  // namespace nudgefem
