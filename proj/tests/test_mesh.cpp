// mesh generator, refinement and persistence checks
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "nudgefem/delaunay.hpp"
#include "nudgefem/mesh.hpp"

using namespace nudgefem;

namespace {

const double PI = 3.14159265358979323846;

MeshHierarchy standard_hierarchy(int depth) {
    return build_hierarchy(generate_annulus(20, 18, 1.0, 0.1), depth);
}

// area of the polygon inscribing the (20, 18) annulus: regular n-gon areas
// (n/2) r^2 sin(2 pi / n) for the outer loop minus the inner one
double annulus_polygon_area() {
    return 10.0 * std::sin(PI / 10.0) - 9.0 * 0.01 * std::sin(PI / 9.0);
}

}  // namespace

TEST_CASE("generator and refinement hit the calibrated counts") {
    const MeshHierarchy hier = standard_hierarchy(4);
    const int expect_v[4] = {164, 618, 2396, 9432};
    const int expect_t[4] = {290, 1160, 4640, 18560};
    for (int l = 0; l < 4; ++l) {
        const TriMesh& m = hier.levels[(std::size_t)l];
        CHECK(m.n_vertices() == expect_v[l]);
        CHECK(m.n_triangles() == expect_t[l]);
        // one-hole domain: V - E + T = 0, so E is pinned by the other two
        CHECK(m.n_edges() == m.n_vertices() + m.n_triangles());
        CHECK(m.level == (1 << l));
    }
}

TEST_CASE("refinement follows the midpoint laws") {
    const MeshHierarchy hier = standard_hierarchy(3);
    for (int l = 0; l + 1 < 3; ++l) {
        const TriMesh& c = hier.levels[(std::size_t)l];
        const TriMesh& f = hier.levels[(std::size_t)l + 1];
        CHECK(f.n_vertices() == c.n_vertices() + c.n_edges());
        CHECK(f.n_triangles() == 4 * c.n_triangles());
    }
}

TEST_CASE("mesh sizes halve per level") {
    const MeshHierarchy hier = standard_hierarchy(4);
    const double expect_h[4] = {0.368, 0.184, 0.092, 0.046};
    double prev = 0.0;
    for (int l = 0; l < 4; ++l) {
        const MeshStats st = mesh_stats(hier.levels[(std::size_t)l]);
        CHECK(st.h_max == doctest::Approx(expect_h[l]).epsilon(0.02));
        CHECK(st.h_min > 0.0);
        CHECK(st.h_min <= st.h_max);
        CHECK(st.h_max <= st.h_max_circum);
        CHECK(st.quality > 10.0);  // degrees; the generator keeps decent shape
        if (l > 0) CHECK(st.h_max == doctest::Approx(0.5 * prev).epsilon(1e-12));
        prev = st.h_max;
    }
}

TEST_CASE("meshed area equals the inscribed polygon area at every level") {
    const MeshHierarchy hier = standard_hierarchy(3);
    const double exact = annulus_polygon_area();
    for (const TriMesh& m : hier.levels) {
        CHECK(mesh_area(m) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("validate accepts generated meshes and names violations") {
    TriMesh m = generate_annulus(20, 18, 1.0, 0.1);
    CHECK_NOTHROW(validate_mesh(m));

    TriMesh flipped = m;
    std::swap(flipped.triangles[0][0], flipped.triangles[0][1]);
    CHECK_THROWS_WITH_AS(validate_mesh(flipped),
                         doctest::Contains("orientation"), std::runtime_error);
}

TEST_CASE("refined vertices nest bitwise in the parent mesh") {
    TriMesh coarse = generate_annulus(20, 18, 1.0, 0.1);
    ParentMap pm;
    TriMesh fine = refine_uniform(coarse, &pm);
    validate_mesh(fine);

    REQUIRE((int)pm.vertex_parent.size() == fine.n_vertices());
    for (int v = 0; v < fine.n_vertices(); ++v) {
        const Vec2& p = fine.vertices[(std::size_t)v];
        if (pm.vertex_parent[(std::size_t)v] >= 0) {
            const Vec2& q = coarse.vertices[(std::size_t)pm.vertex_parent[(std::size_t)v]];
            CHECK(p.x == q.x);
            CHECK(p.y == q.y);
        } else {
            const int e = pm.vertex_parent_edge[(std::size_t)v];
            REQUIRE(e >= 0);
            const Vec2& a = coarse.vertices[(std::size_t)coarse.edges[(std::size_t)e][0]];
            const Vec2& b = coarse.vertices[(std::size_t)coarse.edges[(std::size_t)e][1]];
            CHECK(p.x == 0.5 * (a.x + b.x));
            CHECK(p.y == 0.5 * (a.y + b.y));
        }
    }

    REQUIRE((int)pm.tri_parent.size() == fine.n_triangles());
    for (int t = 0; t < fine.n_triangles(); ++t) {
        const int parent = pm.tri_parent[(std::size_t)t];
        CHECK(parent >= 0);
        CHECK(parent < coarse.n_triangles());
    }
}

TEST_CASE("boundary loops keep their tags and double their edge counts") {
    const MeshHierarchy hier = standard_hierarchy(3);
    for (int l = 0; l < 3; ++l) {
        const TriMesh& m = hier.levels[(std::size_t)l];
        int outer = 0, inner = 0;
        for (BoundaryTag t : m.edge_tag) {
            if (t == BoundaryTag::outer) ++outer;
            if (t == BoundaryTag::inner) ++inner;
        }
        CHECK(outer == 20 * (1 << l));
        CHECK(inner == 18 * (1 << l));
    }
}

TEST_CASE("point location finds interior points and rejects outside ones") {
    const TriMesh m = generate_annulus(20, 18, 1.0, 0.1);

    const Vec2 p{0.5, 0.2};
    const LocateResult r = locate_point(m, p);
    REQUIRE(r.inside);
    const auto& tri = m.triangles[(std::size_t)r.tri];
    double x = 0.0, y = 0.0;
    for (int i = 0; i < 3; ++i) {
        x += r.bary[(std::size_t)i] * m.vertices[(std::size_t)tri[(std::size_t)i]].x;
        y += r.bary[(std::size_t)i] * m.vertices[(std::size_t)tri[(std::size_t)i]].y;
    }
    CHECK(x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(y == doctest::Approx(p.y).epsilon(1e-12));

    CHECK_FALSE(locate_point(m, Vec2{2.0, 0.0}).inside);
    CHECK_FALSE(locate_point(m, Vec2{0.0, 0.0}).inside);  // inside the hole
}

TEST_CASE("save and load round-trip losslessly") {
    const TriMesh m = generate_annulus(20, 18, 1.0, 0.1);
    const std::string path =
        (std::filesystem::temp_directory_path() / "nudgefem_mesh_roundtrip.txt").string();
    save_mesh(m, path);
    const TriMesh back = load_mesh(path);
    std::filesystem::remove(path);

    REQUIRE(back.n_vertices() == m.n_vertices());
    REQUIRE(back.n_triangles() == m.n_triangles());
    for (int v = 0; v < m.n_vertices(); ++v) {
        CHECK(back.vertices[(std::size_t)v].x == m.vertices[(std::size_t)v].x);
        CHECK(back.vertices[(std::size_t)v].y == m.vertices[(std::size_t)v].y);
        CHECK(back.vertex_tag[(std::size_t)v] == m.vertex_tag[(std::size_t)v]);
    }
    for (int t = 0; t < m.n_triangles(); ++t) {
        CHECK(back.triangles[(std::size_t)t] == m.triangles[(std::size_t)t]);
    }
    CHECK_NOTHROW(validate_mesh(back));
}

TEST_CASE("generation is deterministic") {
    const TriMesh a = generate_annulus(20, 18, 1.0, 0.1);
    const TriMesh b = generate_annulus(20, 18, 1.0, 0.1);
    REQUIRE(a.n_vertices() == b.n_vertices());
    REQUIRE(a.n_triangles() == b.n_triangles());
    for (int v = 0; v < a.n_vertices(); ++v) {
        CHECK(a.vertices[(std::size_t)v].x == b.vertices[(std::size_t)v].x);
        CHECK(a.vertices[(std::size_t)v].y == b.vertices[(std::size_t)v].y);
    }
    for (int t = 0; t < a.n_triangles(); ++t) {
        CHECK(a.triangles[(std::size_t)t] == b.triangles[(std::size_t)t]);
    }
}

TEST_CASE("offset disk domain is a valid two-loop mesh") {
    const TriMesh m = generate_offset_disk(20, 18);
    CHECK_NOTHROW(validate_mesh(m));
    CHECK(m.n_edges() == m.n_vertices() + m.n_triangles());
    CHECK(mesh_area(m) > 0.0);
    CHECK(mesh_area(m) < PI);  // inscribed polygons stay inside the unit disk

    int outer = 0, inner = 0;
    for (BoundaryTag t : m.vertex_tag) {
        if (t == BoundaryTag::outer) ++outer;
        if (t == BoundaryTag::inner) ++inner;
    }
    CHECK(outer == 20);
    CHECK(inner == 18);
    for (const Vec2& p : m.vertices) {
        CHECK(p.x * p.x + p.y * p.y <= 1.0 + 1e-12);
    }
}
