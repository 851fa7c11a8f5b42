#include "nudgefem/interp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nudgefem {

namespace {

// barycentric coordinates of p in triangle t of the given mesh
std::array<double, 3> bary_in(const TriMesh& mesh, int t, const Vec2& p) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec2 a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec2 b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec2 c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double area2 = orient2d(a, b, c);
    return {orient2d(p, b, c) / area2, orient2d(a, p, c) / area2, orient2d(a, b, p) / area2};
}

}  // namespace

InterpOperator build_interp(const MeshHierarchy& hierarchy, int coarse_level,
                            int fine_level, int k, InterpVariant variant) {
    const int n_levels = static_cast<int>(hierarchy.levels.size());
    if (coarse_level < 0 || fine_level >= n_levels || coarse_level >= fine_level) {
        throw std::invalid_argument("build_interp: need 0 <= coarse < fine < level count");
    }
    if (k != 1 && k != 2) throw std::invalid_argument("build_interp: k must be 1 or 2");
    if (variant == InterpVariant::quadratic_on_coarse && k != 2) {
        throw std::invalid_argument("build_interp: quadratic variant requires k = 2");
    }
    if (variant == InterpVariant::linear_on_refined && k != 1) {
        throw std::invalid_argument("build_interp: linear variant requires k = 1");
    }
    // the sampling mesh: the coarse mesh itself for degree 2, its one-step
    // refinement for degree 1 (same six observation sites per coarse triangle)
    const int sample_level =
        (variant == InterpVariant::quadratic_on_coarse) ? coarse_level : coarse_level + 1;
    if (sample_level > fine_level) {
        throw std::invalid_argument("build_interp: refined sampling mesh exceeds the fine level");
    }

    const TriMesh& fine = hierarchy.levels[static_cast<std::size_t>(fine_level)];
    const TriMesh& sample_mesh = hierarchy.levels[static_cast<std::size_t>(sample_level)];
    const int deg = k;
    const int n_sf = fine.n_vertices() + fine.n_edges();  // fine P2 scalar dofs

    // sampled scalar dofs on the sampling mesh index fine scalar dofs
    // directly: refinement appends vertices, so vertex v of any coarser level
    // is vertex v of the fine mesh, and a degree-2 midpoint dof of edge e on
    // the coarse mesh is the vertex created for e by the first refinement
    const int n_sites = sample_mesh.n_vertices() + (deg == 2 ? sample_mesh.n_edges() : 0);

    // ancestor triangle on the sampling mesh for every fine triangle
    std::vector<int> ancestor(static_cast<std::size_t>(fine.n_triangles()));
    for (int t = 0; t < fine.n_triangles(); ++t) {
        int cur = t;
        for (int lvl = fine_level; lvl > sample_level; --lvl) {
            cur = hierarchy.parent_maps[static_cast<std::size_t>(lvl - 1)]
                      .tri_parent[static_cast<std::size_t>(cur)];
        }
        ancestor[static_cast<std::size_t>(t)] = cur;
    }

    // fine-space dof coordinates without building a full FeSpace
    auto fine_dof_coord = [&](int t, int i) -> Vec2 {
        const auto& tri = fine.triangles[static_cast<std::size_t>(t)];
        if (i < 3) return fine.vertices[static_cast<std::size_t>(tri[i])];
        static constexpr int opposite[3] = {2, 0, 1};
        const int e = fine.tri_edges[static_cast<std::size_t>(t)][opposite[i - 3]];
        const Vec2 a = fine.vertices[static_cast<std::size_t>(fine.edges[static_cast<std::size_t>(e)][0])];
        const Vec2 b = fine.vertices[static_cast<std::size_t>(fine.edges[static_cast<std::size_t>(e)][1])];
        return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    };
    auto fine_dof_index = [&](int t, int i) -> int {
        const auto& tri = fine.triangles[static_cast<std::size_t>(t)];
        if (i < 3) return tri[i];
        static constexpr int opposite[3] = {2, 0, 1};
        return fine.n_vertices() +
               fine.tri_edges[static_cast<std::size_t>(t)][opposite[i - 3]];
    };
    auto sample_dof_index = [&](int t, int i) -> int {
        const auto& tri = sample_mesh.triangles[static_cast<std::size_t>(t)];
        if (i < 3) return tri[i];
        static constexpr int opposite[3] = {2, 0, 1};
        return sample_mesh.n_vertices() +
               sample_mesh.tri_edges[static_cast<std::size_t>(t)][opposite[i - 3]];
    };

    // one row per fine scalar dof: Lagrange basis values of the containing
    // sampling-mesh triangle at the dof coordinate
    std::vector<Triplet> trips;
    std::vector<char> done(static_cast<std::size_t>(n_sf), 0);
    const int nd = (deg == 1) ? 3 : 6;
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const int st = ancestor[static_cast<std::size_t>(t)];
        for (int i = 0; i < 6; ++i) {
            const int row = fine_dof_index(t, i);
            if (done[static_cast<std::size_t>(row)]) continue;
            done[static_cast<std::size_t>(row)] = 1;
            const Vec2 x = fine_dof_coord(t, i);
            const auto l = bary_in(sample_mesh, st, x);
            double N[6];
            shape_values(deg, l[0], l[1], l[2], N);
            for (int j = 0; j < nd; ++j) {
                // sampled scalar dof indexes the same dof on the fine mesh
                trips.emplace_back(row, sample_dof_index(st, j), N[j]);
            }
        }
    }

    // expand to the stacked two-component layout
    std::vector<Triplet> vec_trips;
    vec_trips.reserve(trips.size() * 2);
    for (const auto& tr : trips) {
        vec_trips.emplace_back(tr.row(), tr.col(), tr.value());
        vec_trips.emplace_back(tr.row() + n_sf, tr.col() + n_sf, tr.value());
    }

    InterpOperator op;
    op.k = k;
    op.coarse_level = coarse_level;
    op.fine_level = fine_level;
    op.variant = variant;
    op.matrix = SpMat(2 * n_sf, 2 * n_sf);
    op.matrix.setFromTriplets(vec_trips.begin(), vec_trips.end());

    op.sample_nodes.reserve(static_cast<std::size_t>(n_sites));
    for (int v = 0; v < sample_mesh.n_vertices(); ++v) {
        op.sample_nodes.push_back(sample_mesh.vertices[static_cast<std::size_t>(v)]);
    }
    if (deg == 2) {
        for (int e = 0; e < sample_mesh.n_edges(); ++e) {
            const Vec2 a = sample_mesh.vertices[static_cast<std::size_t>(
                sample_mesh.edges[static_cast<std::size_t>(e)][0])];
            const Vec2 b = sample_mesh.vertices[static_cast<std::size_t>(
                sample_mesh.edges[static_cast<std::size_t>(e)][1])];
            op.sample_nodes.emplace_back(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        }
    }
    return op;
}

FeField apply(const InterpOperator& op, const FeField& field) {
    if (field.space->n_total() != op.matrix.rows()) {
        throw std::invalid_argument("interp apply: field does not match the operator's fine space");
    }
    FeField out(*field.space);
    out.coeffs = op.matrix * field.coeffs;
    return out;
}

void export_triples(const InterpOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_triples: cannot open " + path);
    char buf[96];
    for (int k = 0; k < op.matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(op.matrix, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value());
            out << buf;
        }
    }
}

InterpRateReport measure_interp_rate(const MeshHierarchy& hierarchy, int k,
                                     const std::function<double(Vec2)>& phi,
                                     const std::function<std::array<double, 2>(Vec2)>& grad_phi,
                                     int m) {
    const int n_levels = static_cast<int>(hierarchy.levels.size());
    if (n_levels < 3) throw std::invalid_argument("measure_interp_rate: need >= 3 levels");
    if (m != 0 && m != 1) throw std::invalid_argument("measure_interp_rate: m must be 0 or 1");
    const int fine_level = n_levels - 1;
    const InterpVariant variant =
        (k == 2) ? InterpVariant::quadratic_on_coarse : InterpVariant::linear_on_refined;

    const TriMesh& fine = hierarchy.levels[static_cast<std::size_t>(fine_level)];
    FeSpace fine_space = build_space(fine, 2, 2);
    // the second component rides along as zero
    FeField field = interpolate_vector(
        fine_space, [&](Vec2 x) -> std::array<double, 2> { return {phi(x), 0.0}; });

    InterpRateReport rep;
    for (int c = 0; c < fine_level; ++c) {
        const InterpOperator op = build_interp(hierarchy, c, fine_level, k, variant);
        const FeField ih = apply(op, field);
        const NormReport err = error_against(
            ih, [&](Vec2 x) -> std::array<double, 2> { return {phi(x), 0.0}; },
            [&](Vec2 x) -> std::array<double, 4> {
                const auto g = grad_phi(x);
                return {g[0], g[1], 0.0, 0.0};
            });
        rep.H.push_back(mesh_stats(hierarchy.levels[static_cast<std::size_t>(c)]).h_max);
        rep.errors.push_back(m == 0 ? err.l2 : err.h1_semi);
    }

    const double scale = std::abs(rep.errors.front());
    if (scale < 1e-12) {
        rep.exact_reproduction = true;
        rep.rate = 0.0;
        rep.constant = 0.0;
        return rep;
    }

    // least-squares line through (log H, log err)
    const std::size_t n = rep.errors.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(rep.H[i]);
        const double y = std::log(rep.errors[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    rep.rate = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    rep.constant = std::exp((sy - rep.rate * sx) / dn);
    const double expo = static_cast<double>(k + 1 - m);
    for (std::size_t i = 0; i < n; ++i) {
        rep.level_constants.push_back(rep.errors[i] / std::pow(rep.H[i], expo));
    }
    return rep;
}

}  // namespace nudgefem
