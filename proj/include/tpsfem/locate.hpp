#pragma once

#include "tpsfem/mesh.hpp"

#include <optional>
#include <vector>

namespace tpsfem {

/// Uniform bin grid over the mesh bounding box for point location.
///
/// The locator holds a pointer to the mesh; rebuild it after every refinement wave.
/// Points on shared edges or vertices resolve to the lowest containing triangle id.
class PointLocator {
public:
    explicit PointLocator(const TriMesh& mesh);

    std::optional<TriId> locate(Point2 p) const;
    const TriMesh& mesh() const { return *mesh_; }

private:
    std::size_t bin_of(double x, double y) const;

    const TriMesh* mesh_;
    Point2 lo_;
    double bin_size_ = 1.0;
    std::size_t nx_ = 1;
    std::size_t ny_ = 1;
    std::vector<std::size_t> offsets_;
    std::vector<TriId> items_;
};

/// Convenience wrapper building a temporary locator.
std::optional<TriId> locate(const TriMesh& mesh, Point2 p);

/// True if p lies in the closed triangle t (barycentric coordinates >= -tol).
bool triangle_contains(const TriMesh& mesh, TriId t, Point2 p, double tol = 1e-12);

} // namespace tpsfem
