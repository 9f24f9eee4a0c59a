#include "tpsfem/boundary.hpp"

#include "tpsfem/error.hpp"

namespace tpsfem {

std::string to_string(BoundaryKind k)
{
    switch (k) {
    case BoundaryKind::tps_approximation: return "tps";
    case BoundaryKind::nodal_average: return "average";
    case BoundaryKind::constant: return "constant";
    }
    return "?";
}

BoundaryKind parse_boundary_kind(const std::string& s)
{
    if (s == "tps" || s == "tps_approximation") return BoundaryKind::tps_approximation;
    if (s == "average" || s == "nodal_average") return BoundaryKind::nodal_average;
    if (s == "constant") return BoundaryKind::constant;
    throw Error(ErrorCode::InvalidArgument, "unknown boundary strategy '" + s + "'");
}

NodeValue tps_node_values(const TpsModel& tps, Point2 p, double alpha)
{
    const auto g = tps.eval_grad(p);
    return {tps.eval(p), g[0], g[1], -alpha * tps.eval_laplacian_proxy(p)};
}

BoundaryValues initial_boundary_values(const TriMesh& mesh, const TpsModel& tps, double alpha)
{
    BoundaryValues bv = BoundaryValues::zeros(mesh);
    for (std::size_t k = 0; k < bv.nodes.size(); ++k) {
        const NodeValue v = tps_node_values(tps, mesh.node(bv.nodes[k]), alpha);
        const auto kk = static_cast<Eigen::Index>(k);
        bv.c[kk] = v.c;
        bv.g1[kk] = v.g1;
        bv.g2[kk] = v.g2;
        bv.w[kk] = v.w;
    }
    return bv;
}

BoundaryValues initial_boundary_values(const TriMesh& mesh, const BoundaryStrategy& strategy, double alpha)
{
    if (strategy.kind == BoundaryKind::constant) {
        BoundaryValues bv = BoundaryValues::zeros(mesh);
        bv.c.setConstant(strategy.constant_value);
        return bv;
    }
    if (!strategy.tps) {
        throw Error(ErrorCode::InvalidArgument, "boundary strategy needs a fitted TPS");
    }
    return initial_boundary_values(mesh, *strategy.tps, alpha);
}

NodeValue new_boundary_node_values(const BoundaryStrategy& strategy, const TriMesh& mesh, NodeId node,
                                    const NodalValues& values, NodeId a, NodeId b, double alpha)
{
    const auto n = static_cast<NodeId>(values.size());
    if (a == kNoNode || b == kNoNode || a >= n || b >= n) {
        throw Error(ErrorCode::NoNeighbors, "new boundary node " + std::to_string(node) + " has no endpoints");
    }
    switch (strategy.kind) {
    case BoundaryKind::constant:
        return {strategy.constant_value, 0.0, 0.0, 0.0};
    case BoundaryKind::tps_approximation:
        if (!strategy.tps) {
            throw Error(ErrorCode::InvalidArgument, "boundary strategy needs a fitted TPS");
        }
        return tps_node_values(*strategy.tps, mesh.node(node), alpha);
    case BoundaryKind::nodal_average:
        break;
    }
    return {0.5 * (values.c[a] + values.c[b]), 0.5 * (values.g1[a] + values.g1[b]),
            0.5 * (values.g2[a] + values.g2[b]), 0.5 * (values.w[a] + values.w[b])};
}

} // namespace tpsfem
