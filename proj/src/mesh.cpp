#include "tpsfem/mesh.hpp"

#include "tpsfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_set>

namespace tpsfem {

namespace {

// Recursion guard for labellings that are not compatible.
constexpr int kMaxRecursionDepth = 4096;

EdgeKey edge_of(const Triangle& t, int local)
{
    return EdgeKey(t.v[static_cast<std::size_t>(local)], t.v[static_cast<std::size_t>((local + 1) % 3)]);
}

EdgeKey base_key(const Triangle& t)
{
    auto [p, q] = t.base();
    return EdgeKey(p, q);
}

} // namespace

TriMesh TriMesh::from_triangles(std::vector<Point2> nodes, std::vector<Triangle> triangles)
{
    TriMesh mesh;
    mesh.nodes_ = std::move(nodes);
    mesh.tris_ = std::move(triangles);
    mesh.parents_.assign(mesh.nodes_.size(), {kNoNode, kNoNode});

    const auto n = static_cast<NodeId>(mesh.nodes_.size());
    for (auto& t : mesh.tris_) {
        for (NodeId id : t.v) {
            if (id < 0 || id >= n) {
                throw Error(ErrorCode::InvalidArgument, "triangle references node " + std::to_string(id));
            }
        }
        if (t.newest < 0 || t.newest > 2) {
            throw Error(ErrorCode::InvalidArgument, "newest index must be 0, 1 or 2");
        }
        const double o = orient(mesh.node(t.v[0]), mesh.node(t.v[1]), mesh.node(t.v[2]));
        if (std::abs(o) < 2e-14) {
            throw Error(ErrorCode::DegenerateTriangle, "zero-area triangle in input");
        }
        if (o < 0) {
            // swap the two non-newest vertices to flip orientation
            const int i = (t.newest + 1) % 3;
            const int j = (t.newest + 2) % 3;
            std::swap(t.v[static_cast<std::size_t>(i)], t.v[static_cast<std::size_t>(j)]);
        }
    }
    mesh.rebuild_edges();
    return mesh;
}

void TriMesh::rebuild_edges()
{
    edge_map_.clear();
    edge_map_.reserve(tris_.size() * 2);
    for (TriId t = 0; t < static_cast<TriId>(tris_.size()); ++t) {
        for (int k = 0; k < 3; ++k) {
            EdgeKey e = edge_of(tris_[static_cast<std::size_t>(t)], k);
            auto [it, inserted] = edge_map_.try_emplace(e.packed(), std::array<TriId, 2>{t, kNoTriangle});
            if (!inserted) {
                if (it->second[1] != kNoTriangle) {
                    throw Error(ErrorCode::InvalidArgument, "edge shared by more than two triangles");
                }
                it->second[1] = t;
            }
        }
    }
    boundary_.assign(nodes_.size(), 0);
    for (const auto& [packed, tris] : edge_map_) {
        if (tris[1] == kNoTriangle) {
            boundary_[packed >> 32] = 1;
            boundary_[packed & 0xffffffffu] = 1;
        }
    }
}

std::size_t TriMesh::num_boundary_nodes() const
{
    return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), 1));
}

std::optional<std::pair<NodeId, NodeId>> TriMesh::node_parents(NodeId id) const
{
    const auto& p = parents_[static_cast<std::size_t>(id)];
    if (p[0] == kNoNode) {
        return std::nullopt;
    }
    return std::make_pair(p[0], p[1]);
}

double TriMesh::area(TriId t) const
{
    const auto& tri = triangle(t);
    return 0.5 * orient(node(tri.v[0]), node(tri.v[1]), node(tri.v[2]));
}

Point2 TriMesh::centroid(TriId t) const
{
    const auto c = corners(t);
    return {(c[0].x1 + c[1].x1 + c[2].x1) / 3.0, (c[0].x2 + c[1].x2 + c[2].x2) / 3.0};
}

std::array<Point2, 3> TriMesh::corners(TriId t) const
{
    const auto& tri = triangle(t);
    return {node(tri.v[0]), node(tri.v[1]), node(tri.v[2])};
}

std::optional<std::array<TriId, 2>> TriMesh::edge_triangles(EdgeKey e) const
{
    auto it = edge_map_.find(e.packed());
    if (it == edge_map_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool TriMesh::is_refinable_edge(EdgeKey e) const
{
    auto tris = edge_triangles(e);
    if (!tris) {
        return false;
    }
    for (TriId t : *tris) {
        if (t != kNoTriangle && base_key(triangle(t)) == e) {
            return true;
        }
    }
    return false;
}

TriId TriMesh::neighbor_across(TriId t, EdgeKey e) const
{
    auto it = edge_map_.find(e.packed());
    if (it == edge_map_.end()) {
        return kNoTriangle;
    }
    return it->second[0] == t ? it->second[1] : it->second[0];
}

std::vector<Edge> TriMesh::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_map_.size());
    for (const auto& [packed, tris] : edge_map_) {
        Edge e;
        e.key.a = static_cast<NodeId>(packed >> 32);
        e.key.b = static_cast<NodeId>(packed & 0xffffffffu);
        e.tris = tris;
        e.boundary = tris[1] == kNoTriangle;
        int base_count = 0;
        int incident = 0;
        for (TriId t : tris) {
            if (t == kNoTriangle) {
                continue;
            }
            ++incident;
            if (base_key(triangle(t)) == e.key) {
                ++base_count;
            }
        }
        e.base_edge = base_count > 0 && base_count == incident;
        e.interface_base_edge = incident == 2 && base_count == 1;
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) { return x.key < y.key; });
    return out;
}

void TriMesh::add_edge_tri(EdgeKey e, TriId t)
{
    auto [it, inserted] = edge_map_.try_emplace(e.packed(), std::array<TriId, 2>{t, kNoTriangle});
    if (!inserted) {
        it->second[1] = t;
    }
}

void TriMesh::replace_edge_tri(EdgeKey e, TriId from, TriId to)
{
    auto& tris = edge_map_.at(e.packed());
    if (tris[0] == from) {
        tris[0] = to;
    } else {
        tris[1] = to;
    }
}

TriId TriMesh::split_one(TriId t, NodeId mid)
{
    const Triangle parent = triangle(t);
    const NodeId n = parent.newest_node();
    const auto [p, q] = parent.base();
    const auto child2 = static_cast<TriId>(tris_.size());

    tris_[static_cast<std::size_t>(t)] = Triangle{{n, p, mid}, 2};
    tris_.push_back(Triangle{{n, mid, q}, 1});

    replace_edge_tri(EdgeKey(q, n), t, child2);
    add_edge_tri(EdgeKey(p, mid), t);
    add_edge_tri(EdgeKey(mid, q), child2);
    edge_map_[EdgeKey(n, mid).packed()] = {t, child2};
    last_split_.push_back(t);
    return child2;
}

void TriMesh::refine_recursive(TriId t, int depth, std::vector<NodeId>& created)
{
    if (depth > kMaxRecursionDepth) {
        throw Error(ErrorCode::NotRefinable, "bisection recursion did not terminate (incompatible labels)");
    }
    max_depth_ = std::max(max_depth_, depth);

    const EdgeKey base = base_key(triangle(t));
    TriId nb = neighbor_across(t, base);
    while (nb != kNoTriangle && !(base_key(triangle(nb)) == base)) {
        refine_recursive(nb, depth + 1, created);
        nb = neighbor_across(t, base);
    }

    const auto [p, q] = triangle(t).base();
    const auto mid = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(midpoint(node(p), node(q)));
    boundary_.push_back(nb == kNoTriangle ? 1 : 0);
    parents_.push_back({p, q});
    created.push_back(mid);

    split_one(t, mid);
    if (nb != kNoTriangle) {
        split_one(nb, mid);
    }
    edge_map_.erase(base.packed());
}

std::vector<NodeId> TriMesh::refine_triangle(TriId t)
{
    if (t < 0 || t >= static_cast<TriId>(tris_.size())) {
        throw Error(ErrorCode::NotRefinable, "invalid triangle id " + std::to_string(t));
    }
    last_split_.clear();
    std::vector<NodeId> created;
    refine_recursive(t, 0, created);
    return created;
}

std::vector<NodeId> TriMesh::bisect_edge(EdgeKey e)
{
    auto tris = edge_triangles(e);
    if (!tris) {
        throw Error(ErrorCode::NotRefinable, "edge does not exist");
    }
    for (TriId t : *tris) {
        if (t != kNoTriangle && base_key(triangle(t)) == e) {
            return refine_triangle(t);
        }
    }
    throw Error(ErrorCode::NotRefinable, "edge is not a base-edge of any incident triangle");
}

TriMesh build_square_mesh(int refine_level)
{
    if (refine_level < 0) {
        throw Error(ErrorCode::InvalidArgument, "refine level must be non-negative");
    }
    constexpr int k = 5;
    std::vector<Point2> nodes;
    nodes.reserve(k * k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            nodes.push_back({i / double(k - 1), j / double(k - 1)});
        }
    }
    auto id = [](int i, int j) { return static_cast<NodeId>(j * k + i); };
    std::vector<Triangle> tris;
    for (int j = 0; j + 1 < k; ++j) {
        for (int i = 0; i + 1 < k; ++i) {
            // diagonal (i,j)-(i+1,j+1); the right-angle corner is the newest node
            tris.push_back(Triangle{{id(i + 1, j), id(i + 1, j + 1), id(i, j)}, 0});
            tris.push_back(Triangle{{id(i, j + 1), id(i, j), id(i + 1, j + 1)}, 0});
        }
    }
    TriMesh mesh = TriMesh::from_triangles(std::move(nodes), std::move(tris));
    for (int l = 0; l < refine_level; ++l) {
        uniform_refine(mesh);
    }
    return mesh;
}

void bisect_all(TriMesh& mesh)
{
    const std::size_t n0 = mesh.num_triangles();
    std::vector<char> done(n0, 0);
    for (std::size_t t = 0; t < n0; ++t) {
        if (done[t]) {
            continue;
        }
        mesh.refine_triangle(static_cast<TriId>(t));
        for (TriId s : mesh.last_split()) {
            if (static_cast<std::size_t>(s) < n0) {
                done[static_cast<std::size_t>(s)] = 1;
            }
        }
    }
}

void uniform_refine(TriMesh& mesh)
{
    bisect_all(mesh);
    bisect_all(mesh);
}

std::vector<NodeId> bisect(TriMesh& mesh, EdgeId edge_id)
{
    auto edges = mesh.edges();
    if (edge_id < 0 || static_cast<std::size_t>(edge_id) >= edges.size()) {
        throw Error(ErrorCode::NotRefinable, "invalid edge id " + std::to_string(edge_id));
    }
    return mesh.bisect_edge(edges[static_cast<std::size_t>(edge_id)].key);
}

ConformityReport check_conformity(const TriMesh& mesh)
{
    ConformityReport rep;
    // recount incidences from the triangle list alone
    std::unordered_map<std::uint64_t, int> count;
    count.reserve(mesh.num_triangles() * 2);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto& tri = mesh.triangle(t);
        if (mesh.area(t) <= 0.0) {
            ++rep.inverted;
        }
        for (int k = 0; k < 3; ++k) {
            ++count[edge_of(tri, k).packed()];
        }
    }
    auto coord_key = [](Point2 p) {
        std::uint64_t a = 0;
        std::uint64_t b = 0;
        std::memcpy(&a, &p.x1, sizeof a);
        std::memcpy(&b, &p.x2, sizeof b);
        return a * 0x9e3779b97f4a7c15ULL ^ b;
    };
    std::unordered_map<std::uint64_t, std::vector<NodeId>> by_coord;
    by_coord.reserve(mesh.num_nodes());
    for (NodeId i = 0; i < static_cast<NodeId>(mesh.num_nodes()); ++i) {
        by_coord[coord_key(mesh.node(i))].push_back(i);
    }
    for (const auto& [packed, c] : count) {
        if (c < 1 || c > 2) {
            ++rep.bad_edges;
            continue;
        }
        if (c == 1) {
            // a node at the midpoint of a single-incidence edge is a hanging node
            const Point2 m = midpoint(mesh.node(static_cast<NodeId>(packed >> 32)),
                                      mesh.node(static_cast<NodeId>(packed & 0xffffffffu)));
            auto it = by_coord.find(coord_key(m));
            if (it != by_coord.end()) {
                for (NodeId id : it->second) {
                    if (mesh.node(id) == m) {
                        ++rep.hanging_nodes;
                    }
                }
            }
        }
    }
    if (count.size() != mesh.num_edges()) {
        ++rep.bad_edges;
    }
    rep.ok = rep.bad_edges == 0 && rep.hanging_nodes == 0 && rep.inverted == 0;
    return rep;
}

std::pair<double, double> angle_range(const TriMesh& mesh)
{
    double lo = 180.0;
    double hi = 0.0;
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto c = mesh.corners(t);
        for (int k = 0; k < 3; ++k) {
            const Point2 a = c[static_cast<std::size_t>(k)];
            const Point2 u = c[static_cast<std::size_t>((k + 1) % 3)] - a;
            const Point2 v = c[static_cast<std::size_t>((k + 2) % 3)] - a;
            const double ang = std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / std::numbers::pi;
            lo = std::min(lo, ang);
            hi = std::max(hi, ang);
        }
    }
    return {lo, hi};
}

double near_boundary_ratio(const TriMesh& mesh, double radius)
{
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    }
    const std::size_t n = mesh.num_nodes();
    std::unordered_map<std::uint64_t, std::vector<NodeId>> grid;
    auto cell = [radius](Point2 p) {
        return std::make_pair(static_cast<std::int64_t>(std::floor(p.x1 / radius)),
                              static_cast<std::int64_t>(std::floor(p.x2 / radius)));
    };
    auto key = [](std::int64_t i, std::int64_t j) {
        return static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(j);
    };
    std::size_t interior = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
        if (mesh.is_boundary(i)) {
            auto [ci, cj] = cell(mesh.node(i));
            grid[key(ci, cj)].push_back(i);
        } else {
            ++interior;
        }
    }
    if (interior == 0) {
        throw Error(ErrorCode::ZeroInterior, "mesh has no interior nodes");
    }
    std::size_t close = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
        if (mesh.is_boundary(i)) {
            continue;
        }
        const Point2 p = mesh.node(i);
        auto [ci, cj] = cell(p);
        bool found = false;
        for (std::int64_t di = -1; di <= 1 && !found; ++di) {
            for (std::int64_t dj = -1; dj <= 1 && !found; ++dj) {
                auto it = grid.find(key(ci + di, cj + dj));
                if (it == grid.end()) {
                    continue;
                }
                for (NodeId b : it->second) {
                    if (distance(p, mesh.node(b)) < radius) {
                        found = true;
                        break;
                    }
                }
            }
        }
        if (found) {
            ++close;
        }
    }
    return static_cast<double>(close) / static_cast<double>(interior);
}

std::vector<std::vector<NodeId>> boundary_loops(const TriMesh& mesh)
{
    // directed boundary edges follow the counter-clockwise orientation of their triangle
    std::unordered_map<NodeId, std::vector<NodeId>> next;
    std::vector<std::pair<NodeId, NodeId>> directed;
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto& tri = mesh.triangle(t);
        for (int k = 0; k < 3; ++k) {
            const NodeId a = tri.v[static_cast<std::size_t>(k)];
            const NodeId b = tri.v[static_cast<std::size_t>((k + 1) % 3)];
            auto tris = mesh.edge_triangles(EdgeKey(a, b));
            if (tris && (*tris)[1] == kNoTriangle) {
                next[a].push_back(b);
                directed.emplace_back(a, b);
            }
        }
    }
    std::sort(directed.begin(), directed.end());
    std::unordered_set<std::uint64_t> used;
    std::vector<std::vector<NodeId>> loops;
    for (auto [a, b] : directed) {
        const std::uint64_t k0 = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
        if (used.count(k0)) {
            continue;
        }
        std::vector<NodeId> loop{a};
        NodeId cur = a;
        NodeId nxt = b;
        while (true) {
            used.insert((static_cast<std::uint64_t>(cur) << 32) | static_cast<std::uint32_t>(nxt));
            if (nxt == a) {
                break;
            }
            loop.push_back(nxt);
            cur = nxt;
            NodeId chosen = kNoNode;
            for (NodeId c : next[cur]) {
                if (!used.count((static_cast<std::uint64_t>(cur) << 32) | static_cast<std::uint32_t>(c))) {
                    chosen = c;
                    break;
                }
            }
            if (chosen == kNoNode) {
                break;
            }
            nxt = chosen;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

double min_edge_length(const TriMesh& mesh)
{
    double h = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.edges()) {
        h = std::min(h, distance(mesh.node(e.key.a), mesh.node(e.key.b)));
    }
    return h;
}

} // namespace tpsfem
