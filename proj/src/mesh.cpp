#include "nudgefem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nudgefem {

void build_edges(TriMesh& mesh) {
    std::map<std::array<int, 2>, int> edge_index;
    mesh.edges.clear();
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i) {
            int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
            if (a > b) std::swap(a, b);
            edge_index.emplace(std::array<int, 2>{a, b}, 0);
        }
    }
    // map iteration is already lexicographic; freeze the numbering
    int idx = 0;
    for (auto& [key, val] : edge_index) {
        val = idx++;
        mesh.edges.push_back(key);
    }

    mesh.tri_edges.assign(mesh.triangles.size(), {-1, -1, -1});
    mesh.edge_tris.assign(mesh.edges.size(), {-1, -1});
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        for (int i = 0; i < 3; ++i) {
            int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
            if (a > b) std::swap(a, b);
            const int e = edge_index.at({a, b});
            mesh.tri_edges[ti][i] = e;
            auto& adj = mesh.edge_tris[e];
            if (adj[0] < 0) {
                adj[0] = static_cast<int>(ti);
            } else if (adj[1] < 0) {
                adj[1] = static_cast<int>(ti);
            } else {
                throw std::runtime_error("build_edges: edge shared by more than two triangles");
            }
        }
    }

    // an edge is boundary iff it has one adjacent triangle; its tag comes
    // from its endpoints, which must agree on a boundary loop
    mesh.edge_tag.assign(mesh.edges.size(), BoundaryTag::none);
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        if (mesh.edge_tris[e][1] >= 0) continue;
        const auto [a, b] = mesh.edges[e];
        const BoundaryTag ta = mesh.vertex_tag[static_cast<std::size_t>(a)];
        const BoundaryTag tb = mesh.vertex_tag[static_cast<std::size_t>(b)];
        if (ta == BoundaryTag::none || ta != tb) {
            throw std::runtime_error("build_edges: boundary edge with inconsistent vertex tags");
        }
        mesh.edge_tag[e] = ta;
    }
}

namespace {

// walk boundary edges of one tag and count closed loops
int count_loops(const TriMesh& mesh, BoundaryTag tag) {
    std::map<int, std::vector<int>> next;  // vertex -> incident boundary edges of tag
    std::set<int> pending;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        if (mesh.edge_tag[static_cast<std::size_t>(e)] != tag) continue;
        pending.insert(e);
        next[mesh.edges[static_cast<std::size_t>(e)][0]].push_back(e);
        next[mesh.edges[static_cast<std::size_t>(e)][1]].push_back(e);
    }
    for (const auto& [v, es] : next) {
        if (es.size() != 2) return -1;  // boundary is not a 1-manifold
    }
    int loops = 0;
    while (!pending.empty()) {
        const int start = *pending.begin();
        int cur = start;
        int vertex = mesh.edges[static_cast<std::size_t>(cur)][0];
        while (true) {
            pending.erase(cur);
            const auto& ends = mesh.edges[static_cast<std::size_t>(cur)];
            vertex = (ends[0] == vertex) ? ends[1] : ends[0];
            const auto& inc = next.at(vertex);
            const int other = (inc[0] == cur) ? inc[1] : inc[0];
            if (pending.count(other) == 0) break;
            cur = other;
        }
        ++loops;
    }
    return loops;
}

}  // namespace

void validate_mesh(const TriMesh& mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty()) {
        throw std::runtime_error("validate_mesh: empty mesh");
    }
    if (mesh.vertex_tag.size() != mesh.vertices.size()) {
        throw std::runtime_error("validate_mesh: vertex tag table size mismatch");
    }
    for (const auto& t : mesh.triangles) {
        const double a2 = orient2d(mesh.vertices[static_cast<std::size_t>(t[0])],
                                   mesh.vertices[static_cast<std::size_t>(t[1])],
                                   mesh.vertices[static_cast<std::size_t>(t[2])]);
        if (!(a2 > 0.0)) {
            throw std::runtime_error("validate_mesh: non-positive triangle orientation");
        }
    }
    for (const auto& adj : mesh.edge_tris) {
        if (adj[0] < 0) throw std::runtime_error("validate_mesh: edge with no triangle");
    }
    const int chi = mesh.n_vertices() - mesh.n_edges() + mesh.n_triangles();
    if (chi != 0) {
        throw std::runtime_error("validate_mesh: Euler characteristic V - E + T != 0");
    }
    if (count_loops(mesh, BoundaryTag::outer) != 1 || count_loops(mesh, BoundaryTag::inner) != 1) {
        throw std::runtime_error("validate_mesh: boundary must form exactly two closed loops");
    }
}

MeshStats mesh_stats(const TriMesh& mesh) {
    MeshStats s;
    s.V = mesh.n_vertices();
    s.E = mesh.n_edges();
    s.T = mesh.n_triangles();
    s.h_min = std::numeric_limits<double>::infinity();
    double min_angle = std::numeric_limits<double>::infinity();
    for (const auto& t : mesh.triangles) {
        const Vec2 p[3] = {mesh.vertices[static_cast<std::size_t>(t[0])],
                           mesh.vertices[static_cast<std::size_t>(t[1])],
                           mesh.vertices[static_cast<std::size_t>(t[2])]};
        double longest = 0.0;
        for (int i = 0; i < 3; ++i) {
            longest = std::max(longest, norm(p[(i + 1) % 3] - p[i]));
            const Vec2 u = p[(i + 1) % 3] - p[i];
            const Vec2 v = p[(i + 2) % 3] - p[i];
            const double c = dot(u, v) / (norm(u) * norm(v));
            min_angle = std::min(min_angle, std::acos(std::clamp(c, -1.0, 1.0)));
        }
        s.h_max = std::max(s.h_max, longest);
        s.h_min = std::min(s.h_min, longest);
        // circumdiameter = product of edge lengths / (2 * area)
        const double a = norm(p[1] - p[0]), b = norm(p[2] - p[1]), c = norm(p[0] - p[2]);
        const double area2 = orient2d(p[0], p[1], p[2]);
        s.h_max_circum = std::max(s.h_max_circum, a * b * c / area2);
    }
    s.quality = min_angle * 180.0 / M_PI;
    return s;
}

TriMesh refine_uniform(const TriMesh& mesh, ParentMap* map_out) {
    TriMesh fine;
    fine.level = mesh.level * 2;
    fine.vertices = mesh.vertices;  // bitwise carry-over keeps nesting exact
    fine.vertex_tag = mesh.vertex_tag;

    ParentMap pm;
    const int nv = mesh.n_vertices();
    pm.vertex_parent.resize(static_cast<std::size_t>(nv));
    pm.vertex_parent_edge.assign(static_cast<std::size_t>(nv), -1);
    for (int v = 0; v < nv; ++v) pm.vertex_parent[static_cast<std::size_t>(v)] = v;

    // one new vertex per coarse edge; canonical edge order fixes the numbering
    std::vector<int> midpoint(mesh.edges.size());
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(mesh.edges[e][0])];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(mesh.edges[e][1])];
        midpoint[e] = fine.n_vertices();
        fine.vertices.emplace_back(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        fine.vertex_tag.push_back(mesh.edge_tag[e]);
        pm.vertex_parent.push_back(-1);
        pm.vertex_parent_edge.push_back(static_cast<int>(e));
    }

    fine.triangles.reserve(mesh.triangles.size() * 4);
    pm.tri_parent.reserve(mesh.triangles.size() * 4);
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        // m[i] is the midpoint of the edge opposite local vertex i
        const int m0 = midpoint[static_cast<std::size_t>(mesh.tri_edges[ti][0])];
        const int m1 = midpoint[static_cast<std::size_t>(mesh.tri_edges[ti][1])];
        const int m2 = midpoint[static_cast<std::size_t>(mesh.tri_edges[ti][2])];
        const std::array<std::array<int, 3>, 4> kids = {{
            {t[0], m2, m1},
            {t[1], m0, m2},
            {t[2], m1, m0},
            {m0, m1, m2},
        }};
        for (const auto& k : kids) {
            fine.triangles.push_back(k);
            pm.tri_parent.push_back(static_cast<int>(ti));
        }
    }

    build_edges(fine);
    if (map_out) *map_out = std::move(pm);
    return fine;
}

MeshHierarchy build_hierarchy(TriMesh coarse, int n_levels) {
    if (n_levels < 1) throw std::invalid_argument("build_hierarchy: n_levels must be >= 1");
    MeshHierarchy h;
    h.levels.push_back(std::move(coarse));
    for (int i = 1; i < n_levels; ++i) {
        ParentMap pm;
        h.levels.push_back(refine_uniform(h.levels.back(), &pm));
        h.parent_maps.push_back(std::move(pm));
    }
    return h;
}

LocateResult locate_point(const TriMesh& mesh, const Vec2& p) {
    constexpr double tol = 1e-10;
    LocateResult r;
    for (int ti = 0; ti < mesh.n_triangles(); ++ti) {
        const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(t[0])];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(t[1])];
        const Vec2 c = mesh.vertices[static_cast<std::size_t>(t[2])];
        const double area2 = orient2d(a, b, c);
        const double l0 = orient2d(p, b, c) / area2;
        const double l1 = orient2d(a, p, c) / area2;
        const double l2 = orient2d(a, b, p) / area2;
        if (l0 >= -tol && l1 >= -tol && l2 >= -tol) {
            r.inside = true;
            r.tri = ti;  // first hit wins, so shared edges go to the lowest index
            r.bary = {l0, l1, l2};
            return r;
        }
    }
    return r;
}

double mesh_area(const TriMesh& mesh) {
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        area += 0.5 * orient2d(mesh.vertices[static_cast<std::size_t>(t[0])],
                               mesh.vertices[static_cast<std::size_t>(t[1])],
                               mesh.vertices[static_cast<std::size_t>(t[2])]);
    }
    return area;
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
    out << mesh.n_vertices() << " " << mesh.n_edges() << " " << mesh.n_triangles() << "\n";
    out << mesh.level << "\n";
    char buf[80];
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", mesh.vertices[v].x,
                      mesh.vertices[v].y, static_cast<int>(mesh.vertex_tag[v]));
        out << buf;
    }
    for (const auto& t : mesh.triangles) {
        out << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

TriMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
    TriMesh mesh;
    int nv = 0, ne = 0, nt = 0;
    if (!(in >> nv >> ne >> nt >> mesh.level)) {
        throw std::runtime_error("load_mesh: bad header in " + path);
    }
    mesh.vertices.resize(static_cast<std::size_t>(nv));
    mesh.vertex_tag.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        int tag = 0;
        if (!(in >> mesh.vertices[static_cast<std::size_t>(v)].x >>
              mesh.vertices[static_cast<std::size_t>(v)].y >> tag)) {
            throw std::runtime_error("load_mesh: bad vertex line in " + path);
        }
        mesh.vertex_tag[static_cast<std::size_t>(v)] = static_cast<BoundaryTag>(tag);
    }
    mesh.triangles.resize(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        if (!(in >> tri[0] >> tri[1] >> tri[2])) {
            throw std::runtime_error("load_mesh: bad triangle line in " + path);
        }
    }
    build_edges(mesh);
    if (mesh.n_edges() != ne) {
        throw std::runtime_error("load_mesh: edge count mismatch in " + path);
    }
    return mesh;
}

}  // namespace nudgefem
