#include "support.hpp"

#include "tpsfem/domain.hpp"
#include "tpsfem/error.hpp"
#include "tpsfem/locate.hpp"
#include "tpsfem/mesh.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace tpsfem;
using namespace tpsfem::testing;

namespace {

TriMesh two_triangle_square()
{
    // Diagonal (1,3) is the shared base-edge; node 0 and node 2 are newest.
    return TriMesh::from_triangles({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 3}, 0}, {{2, 3, 1}, 0}});
}

std::size_t count_edges(const TriMesh& mesh, bool boundary)
{
    std::size_t n = 0;
    for (const Edge& e : mesh.edges()) n += e.boundary == boundary;
    return n;
}

} // namespace

TEST_CASE("square mesh sizes by level")
{
    const TriMesh m0 = build_square_mesh(0);
    CHECK(m0.num_nodes() == 25);
    CHECK(m0.num_triangles() == 32);
    CHECK(build_square_mesh(1).num_nodes() == 81);
    CHECK(build_square_mesh(2).num_nodes() == 289);
    const auto [lo, hi] = angle_range(m0);
    CHECK(lo == doctest::Approx(45.0));
    CHECK(hi == doctest::Approx(90.0));
    CHECK(m0.num_boundary_nodes() == 16);
    CHECK(total_area(m0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("single bisection pass doubles the triangles")
{
    TriMesh m = build_square_mesh(0);
    bisect_all(m);
    CHECK(m.num_triangles() == 64);
    CHECK(m.num_nodes() == 41);
    bisect_all(m);
    CHECK(m.num_nodes() == 81);
}

TEST_CASE("bisecting an interior pair and a boundary edge")
{
    TriMesh m = two_triangle_square();
    const auto created = m.bisect_edge(EdgeKey(1, 3));
    CHECK(created.size() == 1);
    CHECK(m.num_nodes() == 5);
    CHECK(m.num_triangles() == 4);
    CHECK(m.node(created[0]) == Point2{0.5, 0.5});
    for (const Triangle& t : m.triangles()) CHECK(t.newest_node() == created[0]);
    CHECK(check_conformity(m).ok);

    // Every child now has a boundary base-edge: one node, two children.
    const std::size_t tris = m.num_triangles();
    const auto more = m.bisect_edge(EdgeKey(0, 1));
    CHECK(more.size() == 1);
    CHECK(m.num_triangles() == tris + 1);
    CHECK(m.is_boundary(more[0]));
}

TEST_CASE("bisect rejects invalid and non-base edges")
{
    TriMesh m = two_triangle_square();
    CHECK_THROWS_AS(bisect(m, 99), Error);
    const auto edges = m.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!edges[k].base_edge && !edges[k].interface_base_edge) {
            try {
                bisect(m, static_cast<EdgeId>(k));
                FAIL("expected NotRefinable");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::NotRefinable);
            }
            break;
        }
    }
}

TEST_CASE("interface base-edge recursion keeps the mesh conforming")
{
    TriMesh m = build_square_mesh(0);
    for (int k = 0; k < 12; ++k) m.refine_triangle(*locate(m, {0.01, 0.49}));
    m.reset_recursion_depth();
    for (int k = 0; k < 12; ++k) m.refine_triangle(*locate(m, {0.37, 0.52}));
    CHECK(m.max_recursion_depth() >= 3);
    const auto rep = check_conformity(m);
    CHECK(rep.ok);
    CHECK(rep.hanging_nodes == 0);
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("random refinement preserves conformity, angles and area")
{
    std::mt19937_64 rng(5);
    TriMesh m = build_square_mesh(0);
    for (int wave = 0; wave < 60; ++wave) {
        std::uniform_int_distribution<std::size_t> pick(0, m.num_triangles() - 1);
        m.refine_triangle(static_cast<TriId>(pick(rng)));
        REQUIRE(check_conformity(m).ok);
    }
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        for (double a : triangle_angles(m, static_cast<TriId>(t))) {
            const bool ok = std::abs(a - 45.0) < 1e-9 || std::abs(a - 90.0) < 1e-9;
            CHECK(ok);
        }
    }
    CHECK(std::abs(total_area(m) - 1.0) <= 1e-12);
    // Euler characteristic of a disc.
    const auto v = static_cast<long>(m.num_nodes());
    const auto e = static_cast<long>(m.num_edges());
    const auto f = static_cast<long>(m.num_triangles());
    CHECK(v - e + f == 1);
}

TEST_CASE("newest node of each child is the midpoint it was created with")
{
    TriMesh m = build_square_mesh(0);
    for (int k = 0; k < 10; ++k) {
        const TriId t = static_cast<TriId>(k * 3 % m.num_triangles());
        m.refine_triangle(t);
        for (TriId child : m.last_split()) {
            const NodeId nn = m.triangle(child).newest_node();
            CHECK(m.node_parents(nn).has_value());
        }
    }
}

TEST_CASE("conformity checker detects a hanging node")
{
    // Left triangle has its hypotenuse split while the right one does not.
    const TriMesh bad = TriMesh::from_triangles(
        {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}},
        {{{0, 1, 4}, 2}, {{0, 4, 2}, 1}, {{1, 3, 2}, 0}});
    const auto rep = check_conformity(bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.hanging_nodes >= 1);
}

TEST_CASE("locate uses the lowest id on shared vertices and rejects outside points")
{
    const TriMesh m = build_square_mesh(0);
    const PointLocator loc(m);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        CHECK(loc.locate(m.centroid(static_cast<TriId>(t))) == static_cast<TriId>(t));
    }
    CHECK_FALSE(loc.locate({1.5, 0.5}).has_value());
    CHECK_FALSE(loc.locate({-1e-3, 0.5}).has_value());

    const Point2 v{0.5, 0.5};
    TriId lowest = kNoTriangle;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        if (triangle_contains(m, static_cast<TriId>(t), v)) {
            lowest = static_cast<TriId>(t);
            break;
        }
    }
    CHECK(loc.locate(v) == lowest);
}

TEST_CASE("near-boundary ratio")
{
    CHECK(near_boundary_ratio(build_square_mesh(0), 0.005) == 0.0);

    // Fan around an interior node 0.004 from the boundary node (0.5, 0).
    std::vector<Point2> nodes{{0.5, 0.004}, {0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const TriMesh m = TriMesh::from_triangles(
        nodes, {{{0, 1, 2}, 0}, {{0, 2, 3}, 0}, {{0, 3, 4}, 0}, {{0, 4, 5}, 0}, {{0, 5, 1}, 0}});
    CHECK(near_boundary_ratio(m, 0.005) == doctest::Approx(1.0));
    CHECK(near_boundary_ratio(m, 0.003) == doctest::Approx(0.0));

    const TriMesh all_boundary = two_triangle_square();
    CHECK_THROWS_AS(near_boundary_ratio(all_boundary, 0.005), Error);
}

TEST_CASE("trimming removes empty triangles only")
{
    const TriMesh m = build_square_mesh(2);
    DataSet full = affine_data(20000, 3);
    const TriMesh same = trim_to_irregular(m, full);
    CHECK(same.num_nodes() == m.num_nodes());
    CHECK(same.num_triangles() == m.num_triangles());

    DataSet quad = affine_data(300, 4, Affine{}, {{0.05, 0.05}, {0.45, 0.45}});
    const TriMesh trimmed = trim_to_irregular(m, quad);
    CHECK(trimmed.num_nodes() < m.num_nodes());
    CHECK(check_conformity(trimmed).ok);
    for (Point2 p : quad.points) CHECK(locate(trimmed, p).has_value());

    DataSet none;
    none.points = {{2.0, 2.0}};
    none.values = {0.0};
    CHECK_THROWS_AS(trim_to_irregular(m, none), Error);
}

TEST_CASE("mesh text round trip")
{
    TriMesh m = build_square_mesh(0);
    m.refine_triangle(3);
    std::stringstream s;
    write_mesh(s, m);
    const TriMesh back = read_mesh(s);
    CHECK(back.num_nodes() == m.num_nodes());
    CHECK(back.num_triangles() == m.num_triangles());
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        CHECK(back.triangle(static_cast<TriId>(t)).newest_node() == m.triangle(static_cast<TriId>(t)).newest_node());
    }
    std::stringstream junk("not a mesh");
    CHECK_THROWS_AS(read_mesh(junk), Error);
}

TEST_CASE("polygon meshing keeps triangles inside the outline")
{
    Polygon l_shape;
    l_shape.loops.push_back({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
    const TriMesh m = mesh_polygon(l_shape, 1);
    CHECK(check_conformity(m).ok);
    CHECK(total_area(m) == doctest::Approx(0.75));
    for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(l_shape.contains(m.centroid(static_cast<TriId>(t))));
}
