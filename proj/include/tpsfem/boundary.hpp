#pragma once

#include "tpsfem/saddle.hpp"
#include "tpsfem/tps.hpp"

#include <memory>
#include <string>

namespace tpsfem {

enum class BoundaryKind { tps_approximation, nodal_average, constant };

std::string to_string(BoundaryKind k);
BoundaryKind parse_boundary_kind(const std::string& s);

struct BoundaryStrategy {
    BoundaryKind kind = BoundaryKind::nodal_average;
    double constant_value = 0.0;
    /// Used for initial values of every non-constant strategy and for new
    /// boundary nodes under tps_approximation.
    std::shared_ptr<const TpsModel> tps;
};

/// c, g from the TPS value and gradient, w = -alpha * laplacian proxy.
NodeValue tps_node_values(const TpsModel& tps, Point2 p, double alpha);

/// Boundary values of every boundary node from the TPS.
BoundaryValues initial_boundary_values(const TriMesh& mesh, const TpsModel& tps, double alpha);

/// Initial boundary values for a strategy (the constant strategy ignores the TPS).
BoundaryValues initial_boundary_values(const TriMesh& mesh, const BoundaryStrategy& strategy, double alpha);

/// Values for a boundary node created by bisecting the boundary edge (a, b).
/// `values` holds the current nodal values (only entries a and b are read).
/// Throws NoNeighbors if either endpoint is missing.
NodeValue new_boundary_node_values(const BoundaryStrategy& strategy, const TriMesh& mesh, NodeId node,
                                    const NodalValues& values, NodeId a, NodeId b, double alpha);

} // namespace tpsfem
