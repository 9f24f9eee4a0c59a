#pragma once

#include "tpsfem/dataset.hpp"
#include "tpsfem/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tpsfem {

enum class DomainKind { square, irregular };

/// Closed polylines; the first loop is the outer boundary, the rest are holes.
struct Polygon {
    std::vector<std::vector<Point2>> loops;

    /// Even-odd containment over all loops.
    bool contains(Point2 p) const;
};

/// Removes triangles that contain no data point. Triangles needed to keep the
/// retained set edge-connected are kept as bridges (breadth-first search from the
/// component holding the most data). Throws EmptyResult if no triangle holds data.
TriMesh trim_to_irregular(const TriMesh& mesh, const DataSet& data);

/// Meshes a polygon by trimming build_square_mesh(level) to triangles whose
/// centroid lies inside the polygon.
TriMesh mesh_polygon(const Polygon& polygon, int level);

/// Keeps the listed triangles (in the given order), renumbering nodes.
TriMesh submesh(const TriMesh& mesh, const std::vector<TriId>& keep);

// Text formats. Mesh: "tpsfem-mesh v1", "nodes N", N x "id x1 x2 boundary",
// "tris M", M x "id n0 n1 n2 newest_idx". Polygon: "loop K" + K x "x1 x2" per loop.
void write_mesh(std::ostream& out, const TriMesh& mesh);
void write_mesh(const std::filesystem::path& path, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);
TriMesh read_mesh(const std::filesystem::path& path);
Polygon read_polygon(std::istream& in);
Polygon read_polygon(const std::filesystem::path& path);
void write_polygon(std::ostream& out, const Polygon& polygon);

} // namespace tpsfem
