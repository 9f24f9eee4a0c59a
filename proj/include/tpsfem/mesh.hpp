#pragma once

#include "tpsfem/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tpsfem {

using NodeId = std::int32_t;
using TriId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr TriId kNoTriangle = -1;
inline constexpr NodeId kNoNode = -1;

/// Triangle stored counter-clockwise with the index (0..2) of its newest node.
/// The base-edge is the edge opposite the newest node.
struct Triangle {
    std::array<NodeId, 3> v{};
    int newest = 0;

    NodeId newest_node() const { return v[newest]; }
    /// Base-edge endpoints in counter-clockwise order after the newest node.
    std::pair<NodeId, NodeId> base() const { return {v[(newest + 1) % 3], v[(newest + 2) % 3]}; }
};

/// Unordered node pair used to name edges independently of edge ids.
struct EdgeKey {
    NodeId a = kNoNode; ///< smaller id
    NodeId b = kNoNode; ///< larger id

    EdgeKey() = default;
    EdgeKey(NodeId p, NodeId q) : a(p < q ? p : q), b(p < q ? q : p) {}

    std::uint64_t packed() const
    {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    }
    friend bool operator==(EdgeKey x, EdgeKey y) { return x.a == y.a && x.b == y.b; }
    friend bool operator<(EdgeKey x, EdgeKey y) { return x.packed() < y.packed(); }
};

struct EdgeKeyHash {
    std::size_t operator()(EdgeKey k) const noexcept { return std::hash<std::uint64_t>{}(k.packed()); }
};

/// Edge snapshot returned by TriMesh::edges(). Ids are positions in that list and
/// stay valid only until the next mutation of the mesh.
struct Edge {
    EdgeKey key;
    std::array<TriId, 2> tris{kNoTriangle, kNoTriangle};
    bool boundary = false;
    bool base_edge = false;           ///< base-edge of every incident triangle
    bool interface_base_edge = false; ///< base-edge of exactly one of two incident triangles
};

/// Conforming triangular mesh with newest-node bisection.
///
/// Nodes and triangles are never deleted. Bisecting a triangle keeps its id for the
/// first child and appends the second child, so triangle ids stay dense.
class TriMesh {
public:
    TriMesh() = default;

    /// Builds a mesh from raw nodes and triangles. Triangles are re-oriented
    /// counter-clockwise (keeping the newest node). Throws DegenerateTriangle for
    /// zero-area triangles and InvalidArgument for non-manifold edges.
    static TriMesh from_triangles(std::vector<Point2> nodes, std::vector<Triangle> triangles);

    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_triangles() const { return tris_.size(); }
    std::size_t num_edges() const { return edge_map_.size(); }

    const std::vector<Point2>& nodes() const { return nodes_; }
    const std::vector<Triangle>& triangles() const { return tris_; }
    Point2 node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const Triangle& triangle(TriId id) const { return tris_[static_cast<std::size_t>(id)]; }
    bool is_boundary(NodeId id) const { return boundary_[static_cast<std::size_t>(id)] != 0; }
    std::size_t num_boundary_nodes() const;

    /// Endpoints of the edge whose midpoint created this node, or nullopt for
    /// nodes of the initial mesh.
    std::optional<std::pair<NodeId, NodeId>> node_parents(NodeId id) const;

    double area(TriId t) const;
    Point2 centroid(TriId t) const;
    std::array<Point2, 3> corners(TriId t) const;

    /// Incident triangles of an edge, or nullopt if the edge does not exist.
    std::optional<std::array<TriId, 2>> edge_triangles(EdgeKey e) const;
    bool has_edge(EdgeKey e) const { return edge_map_.count(e.packed()) != 0; }
    /// True if the edge is the base-edge of at least one incident triangle.
    bool is_refinable_edge(EdgeKey e) const;
    TriId neighbor_across(TriId t, EdgeKey e) const;

    /// Edges sorted by node pair.
    std::vector<Edge> edges() const;

    /// Bisects the triangle pair sharing the given base-edge, recursively refining
    /// coarse neighbours across interface base-edges first. Returns the created nodes.
    std::vector<NodeId> bisect_edge(EdgeKey e);
    /// Bisects triangle t along its base-edge (with the required recursion).
    std::vector<NodeId> refine_triangle(TriId t);

    /// Depth of the deepest recursive chain seen since the last reset.
    int max_recursion_depth() const { return max_depth_; }
    void reset_recursion_depth() { max_depth_ = 0; }

    /// Triangle ids bisected by the last refine_triangle/bisect_edge call.
    const std::vector<TriId>& last_split() const { return last_split_; }

private:
    void rebuild_edges();
    void add_edge_tri(EdgeKey e, TriId t);
    void replace_edge_tri(EdgeKey e, TriId from, TriId to);
    void refine_recursive(TriId t, int depth, std::vector<NodeId>& created);
    TriId split_one(TriId t, NodeId mid);

    std::vector<Point2> nodes_;
    std::vector<char> boundary_;
    std::vector<std::array<NodeId, 2>> parents_;
    std::vector<Triangle> tris_;
    std::unordered_map<std::uint64_t, std::array<TriId, 2>> edge_map_;
    std::vector<TriId> last_split_;
    int max_depth_ = 0;
};

/// Square [0,1]^2 mesh: 5x5 nodes of isosceles right triangles with hypotenuse
/// base-edges, followed by `refine_level` uniform refinements.
TriMesh build_square_mesh(int refine_level);

/// One pass of newest-node bisection over every triangle present at the start.
void bisect_all(TriMesh& mesh);

/// One uniform refinement level (two bisection passes, halving the mesh size).
void uniform_refine(TriMesh& mesh);

/// Bisects by edge id (ids from mesh.edges()). Throws NotRefinable for invalid ids
/// or edges that are not (interface) base-edges.
std::vector<NodeId> bisect(TriMesh& mesh, EdgeId edge_id);

/// Result of the mesh consistency check.
struct ConformityReport {
    bool ok = true;
    std::size_t bad_edges = 0;       ///< edges with incidence other than 1 or 2
    std::size_t hanging_nodes = 0;   ///< nodes lying inside another triangle's edge
    std::size_t inverted = 0;        ///< non-positive area triangles
};
ConformityReport check_conformity(const TriMesh& mesh);

/// Minimum and maximum interior angle (degrees) over all triangles.
std::pair<double, double> angle_range(const TriMesh& mesh);

/// Fraction of interior nodes closer than `radius` to some boundary node.
double near_boundary_ratio(const TriMesh& mesh, double radius);

/// Closed boundary polylines (node id chains) of the mesh.
std::vector<std::vector<NodeId>> boundary_loops(const TriMesh& mesh);

double min_edge_length(const TriMesh& mesh);

} // namespace tpsfem
