#include "tpsfem/domain.hpp"
#include "tpsfem/error.hpp"
#include "tpsfem/locate.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace tpsfem {

namespace {

std::array<TriId, 3> edge_neighbors(const TriMesh& mesh, TriId t)
{
    const auto& tri = mesh.triangle(t);
    std::array<TriId, 3> out{};
    for (int k = 0; k < 3; ++k) {
        out[static_cast<std::size_t>(k)] = mesh.neighbor_across(
            t, EdgeKey(tri.v[static_cast<std::size_t>(k)], tri.v[static_cast<std::size_t>((k + 1) % 3)]));
    }
    return out;
}

/// Joins every weighted component to the heaviest one through bridging triangles.
std::vector<char> connect_components(const TriMesh& mesh, std::vector<char> keep,
                                     const std::vector<std::size_t>& weight)
{
    const std::size_t nt = mesh.num_triangles();
    std::vector<int> comp(nt, -1);
    std::vector<std::size_t> comp_weight;
    for (std::size_t s = 0; s < nt; ++s) {
        if (!keep[s] || comp[s] >= 0) continue;
        const int id = static_cast<int>(comp_weight.size());
        comp_weight.push_back(0);
        std::deque<TriId> queue{static_cast<TriId>(s)};
        comp[s] = id;
        while (!queue.empty()) {
            const TriId t = queue.front();
            queue.pop_front();
            comp_weight[static_cast<std::size_t>(id)] += weight[static_cast<std::size_t>(t)];
            for (TriId nb : edge_neighbors(mesh, t)) {
                if (nb != kNoTriangle && keep[static_cast<std::size_t>(nb)] && comp[static_cast<std::size_t>(nb)] < 0) {
                    comp[static_cast<std::size_t>(nb)] = id;
                    queue.push_back(nb);
                }
            }
        }
    }
    if (comp_weight.size() <= 1) {
        return keep;
    }
    std::vector<int> order(comp_weight.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return comp_weight[static_cast<std::size_t>(a)] > comp_weight[static_cast<std::size_t>(b)]; });

    std::vector<char> in_main(nt, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        if (comp[t] == order[0]) in_main[t] = 1;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
        const int target = order[k];
        bool already = false;
        for (std::size_t t = 0; t < nt && !already; ++t) {
            already = comp[t] == target && in_main[t];
        }
        if (already) continue;
        // multi-source BFS from the merged set through the full mesh
        std::vector<TriId> prev(nt, kNoTriangle);
        std::vector<char> seen(nt, 0);
        std::deque<TriId> queue;
        for (std::size_t t = 0; t < nt; ++t) {
            if (in_main[t]) {
                seen[t] = 1;
                queue.push_back(static_cast<TriId>(t));
            }
        }
        TriId hit = kNoTriangle;
        while (!queue.empty() && hit == kNoTriangle) {
            const TriId t = queue.front();
            queue.pop_front();
            for (TriId nb : edge_neighbors(mesh, t)) {
                if (nb == kNoTriangle || seen[static_cast<std::size_t>(nb)]) continue;
                seen[static_cast<std::size_t>(nb)] = 1;
                prev[static_cast<std::size_t>(nb)] = t;
                if (comp[static_cast<std::size_t>(nb)] == target) {
                    hit = nb;
                    break;
                }
                queue.push_back(nb);
            }
        }
        if (hit == kNoTriangle) continue;
        for (TriId t = prev[static_cast<std::size_t>(hit)]; t != kNoTriangle && !in_main[static_cast<std::size_t>(t)];
             t = prev[static_cast<std::size_t>(t)]) {
            in_main[static_cast<std::size_t>(t)] = 1;
            keep[static_cast<std::size_t>(t)] = 1;
        }
        for (std::size_t t = 0; t < nt; ++t) {
            if (comp[t] == target) in_main[t] = 1;
        }
    }
    return keep;
}

} // namespace

TriMesh submesh(const TriMesh& mesh, const std::vector<TriId>& keep)
{
    std::vector<NodeId> remap(mesh.num_nodes(), kNoNode);
    std::vector<char> used(mesh.num_nodes(), 0);
    for (TriId t : keep) {
        for (NodeId v : mesh.triangle(t).v) used[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<Point2> nodes;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (used[i]) {
            remap[i] = static_cast<NodeId>(nodes.size());
            nodes.push_back(mesh.node(static_cast<NodeId>(i)));
        }
    }
    std::vector<Triangle> tris;
    tris.reserve(keep.size());
    for (TriId t : keep) {
        Triangle tri = mesh.triangle(t);
        for (auto& v : tri.v) v = remap[static_cast<std::size_t>(v)];
        tris.push_back(tri);
    }
    return TriMesh::from_triangles(std::move(nodes), std::move(tris));
}

TriMesh trim_to_irregular(const TriMesh& mesh, const DataSet& data)
{
    if (data.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "trimming needs data");
    }
    PointLocator locator(mesh);
    std::vector<std::size_t> count(mesh.num_triangles(), 0);
    for (const auto& p : data.points) {
        if (auto t = locator.locate(p)) {
            ++count[static_cast<std::size_t>(*t)];
        }
    }
    std::vector<char> keep(mesh.num_triangles(), 0);
    bool any = false;
    for (std::size_t t = 0; t < keep.size(); ++t) {
        keep[t] = count[t] > 0;
        any = any || keep[t];
    }
    if (!any) {
        throw Error(ErrorCode::EmptyResult, "no triangle contains data");
    }
    keep = connect_components(mesh, std::move(keep), count);
    std::vector<TriId> ids;
    for (std::size_t t = 0; t < keep.size(); ++t) {
        if (keep[t]) ids.push_back(static_cast<TriId>(t));
    }
    if (ids.size() == mesh.num_triangles()) {
        return mesh;
    }
    return submesh(mesh, ids);
}

bool Polygon::contains(Point2 p) const
{
    bool inside = false;
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point2 a = loop[i];
            const Point2 b = loop[j];
            if ((a.x2 > p.x2) != (b.x2 > p.x2) &&
                p.x1 < (b.x1 - a.x1) * (p.x2 - a.x2) / (b.x2 - a.x2) + a.x1) {
                inside = !inside;
            }
        }
    }
    return inside;
}

TriMesh mesh_polygon(const Polygon& polygon, int level)
{
    if (polygon.loops.empty() || polygon.loops.front().size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "polygon needs an outer loop with at least 3 vertices");
    }
    TriMesh square = build_square_mesh(level);
    std::vector<char> keep(square.num_triangles(), 0);
    std::vector<std::size_t> weight(square.num_triangles(), 0);
    bool any = false;
    for (TriId t = 0; t < static_cast<TriId>(square.num_triangles()); ++t) {
        if (polygon.contains(square.centroid(t))) {
            keep[static_cast<std::size_t>(t)] = 1;
            weight[static_cast<std::size_t>(t)] = 1;
            any = true;
        }
    }
    if (!any) {
        throw Error(ErrorCode::EmptyResult, "polygon contains no triangle centroid; refine the level");
    }
    keep = connect_components(square, std::move(keep), weight);
    std::vector<TriId> ids;
    for (std::size_t t = 0; t < keep.size(); ++t) {
        if (keep[t]) ids.push_back(static_cast<TriId>(t));
    }
    return submesh(square, ids);
}

} // namespace tpsfem
