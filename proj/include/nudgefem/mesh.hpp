#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nudgefem/geo.hpp"

namespace nudgefem {

enum class BoundaryTag : std::uint8_t { none = 0, outer = 1, inner = 2 };

/** Conforming triangle mesh of a two-loop polygonal domain (disk with one
 *  hole). Triangles are counterclockwise. Edges are canonical: each stored as
 *  a sorted vertex pair, the table sorted lexicographically, so edge indices
 *  are reproducible across runs and refinement is deterministic. */
struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;

    // derived connectivity, filled by build_edges
    std::vector<std::array<int, 2>> edges;       // sorted vertex pairs, lex order
    std::vector<std::array<int, 3>> tri_edges;   // edge index opposite local vertex i
    std::vector<std::array<int, 2>> edge_tris;   // adjacent triangles, -1 when boundary

    std::vector<BoundaryTag> vertex_tag;  // one per vertex
    std::vector<BoundaryTag> edge_tag;    // one per edge

    int level = 1;  // doubles per refinement: 1, 2, 4, 8, ...

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
};

// how a refined vertex relates to its parent mesh
struct ParentMap {
    // per fine vertex: parent vertex index, or -1 when it is an edge midpoint
    std::vector<int> vertex_parent;
    // per fine vertex: parent edge index when a midpoint, else -1
    std::vector<int> vertex_parent_edge;
    // per fine triangle: parent coarse triangle
    std::vector<int> tri_parent;
};

struct MeshHierarchy {
    std::vector<TriMesh> levels;        // coarsest first
    std::vector<ParentMap> parent_maps; // parent_maps[i] maps levels[i+1] back to levels[i]
};

struct MeshStats {
    int V = 0;
    int E = 0;
    int T = 0;
    double h_max = 0.0;        // max over triangles of the longest edge
    double h_min = 0.0;        // min over triangles of the longest edge
    double h_max_circum = 0.0; // max circumscribed-circle diameter, reported alongside
    double quality = 0.0;      // smallest angle in degrees
};

struct LocateResult {
    bool inside = false;
    int tri = -1;
    std::array<double, 3> bary{0.0, 0.0, 0.0};
};

// rebuild the canonical edge table and triangle/edge adjacency from
// vertices + triangles; vertex and edge tags are derived from the given
// per-vertex tags (an edge is tagged when boundary and both ends share a tag)
void build_edges(TriMesh& mesh);

// check all structural invariants: positive orientation, conformity (every
// edge in 1 or 2 triangles), Euler characteristic V - E + T = 0, boundary
// edges forming exactly two closed tagged loops. Throws std::runtime_error
// naming the violated invariant.
void validate_mesh(const TriMesh& mesh);

MeshStats mesh_stats(const TriMesh& mesh);

// midpoint refinement: every triangle splits into 4 congruent children, new
// vertices at edge midpoints, boundary midpoints stay on the straight
// polygonal boundary (no circle projection), coarse vertices carried over
// bitwise so nesting is exact
TriMesh refine_uniform(const TriMesh& mesh, ParentMap* map_out = nullptr);

// refine the coarse mesh n_levels-1 times
MeshHierarchy build_hierarchy(TriMesh coarse, int n_levels);

// brute-force point location; points on shared edges resolve to the
// lowest-index adjacent triangle, tolerance 1e-10 on barycentric range
LocateResult locate_point(const TriMesh& mesh, const Vec2& p);

// area of the meshed polygon, summed over triangles
double mesh_area(const TriMesh& mesh);

// plain-text save/load: header "V E T", vertex lines "x y tag", triangle
// lines "a b c", 17 significant digits so round-trips are lossless
void save_mesh(const TriMesh& mesh, const std::string& path);
TriMesh load_mesh(const std::string& path);

}  // namespace nudgefem
