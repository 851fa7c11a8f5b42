#pragma once

#include "nudgefem/mesh.hpp"

namespace nudgefem {

// Delaunay triangulation of a two-loop polygonal domain. Boundary loops are
// inserted verbatim (their coordinates appear bitwise in the mesh), interior
// points come from a graded ring layout around the hole. Loop edges missing
// from the Delaunay triangulation are recovered by edge flips; triangles
// outside the outer loop or inside the hole are discarded.
TriMesh triangulate_two_loop_domain(const std::vector<Vec2>& outer_loop,
                                    const std::vector<Vec2>& inner_loop,
                                    const std::vector<Vec2>& interior);

// graded interior layout: rings around the hole center, spacing follows a
// power law interpolating the two boundary edge lengths
std::vector<Vec2> graded_ring_points(const std::vector<Vec2>& outer_loop,
                                     const std::vector<Vec2>& inner_loop,
                                     int n_outer, int n_inner,
                                     double r_outer, double r_inner,
                                     const Vec2& hole_center);

// annulus between circles of radius r_inner and r_outer about the origin,
// boundaries are inscribed regular polygons
TriMesh generate_annulus(int n_outer, int n_inner, double r_outer, double r_inner);

// unit disk about the origin with a hole of radius 0.1 centered at (0.5, 0)
TriMesh generate_offset_disk(int n_outer, int n_inner);

}  // namespace nudgefem
