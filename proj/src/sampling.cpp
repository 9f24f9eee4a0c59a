#include "tpsfem/sampling.hpp"

#include "tpsfem/error.hpp"

#include <algorithm>
#include <random>

namespace tpsfem {

namespace {

struct Cell {
    Rect box;
    std::vector<std::size_t> items;
};

void split(const DataSet& data, Cell cell, std::size_t cap, int depth, std::vector<Cell>& leaves)
{
    if (cell.items.size() <= cap || depth >= 40) {
        if (!cell.items.empty()) leaves.push_back(std::move(cell));
        return;
    }
    const Point2 mid = midpoint(cell.box.lo, cell.box.hi);
    std::array<Cell, 4> kids;
    kids[0].box = {cell.box.lo, mid};
    kids[1].box = {{mid.x1, cell.box.lo.x2}, {cell.box.hi.x1, mid.x2}};
    kids[2].box = {{cell.box.lo.x1, mid.x2}, {mid.x1, cell.box.hi.x2}};
    kids[3].box = {mid, cell.box.hi};
    for (std::size_t i : cell.items) {
        const Point2 p = data.points[i];
        const std::size_t q = (p.x1 < mid.x1 ? 0 : 1) + (p.x2 < mid.x2 ? 0 : 2);
        kids[q].items.push_back(i);
    }
    for (auto& k : kids) {
        split(data, std::move(k), cap, depth + 1, leaves);
    }
}

} // namespace

std::string to_string(SampleStrategy s)
{
    switch (s) {
    case SampleStrategy::random: return "random";
    case SampleStrategy::quadtree: return "quadtree";
    case SampleStrategy::quadtree_boundary_band: return "quadtree_boundary_band";
    }
    return "?";
}

SampleStrategy parse_sample_strategy(const std::string& s)
{
    if (s == "random") return SampleStrategy::random;
    if (s == "quadtree") return SampleStrategy::quadtree;
    if (s == "quadtree_boundary_band" || s == "band") return SampleStrategy::quadtree_boundary_band;
    throw Error(ErrorCode::InvalidArgument, "unknown sampling strategy '" + s + "'");
}

std::vector<std::size_t> sample_indices(const DataSet& data, const SamplePlan& plan, std::uint64_t seed)
{
    std::vector<std::size_t> candidates;
    candidates.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Point2 p = data.points[i];
        const bool inside_band = plan.strategy == SampleStrategy::quadtree_boundary_band &&
                                 p.x1 > plan.band.lo.x1 && p.x1 < plan.band.hi.x1 &&
                                 p.x2 > plan.band.lo.x2 && p.x2 < plan.band.hi.x2;
        if (!inside_band) candidates.push_back(i);
    }
    const std::size_t n = candidates.size();
    if (plan.count > n) {
        throw Error(ErrorCode::InsufficientData, "requested " + std::to_string(plan.count) + " samples from " +
                                                     std::to_string(n) + " candidate points");
    }
    if (plan.count == n) {
        return candidates;
    }
    if (plan.count < 10) {
        throw Error(ErrorCode::InvalidArgument, "sample count must be at least 10");
    }

    std::mt19937_64 rng(seed);
    if (plan.strategy == SampleStrategy::random) {
        // partial Fisher-Yates
        for (std::size_t k = 0; k < plan.count; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(candidates[k], candidates[pick(rng)]);
        }
        candidates.resize(plan.count);
        return candidates;
    }

    Cell root;
    root.box = {data.points[candidates[0]], data.points[candidates[0]]};
    for (std::size_t i : candidates) {
        const Point2 p = data.points[i];
        root.box.lo = {std::min(root.box.lo.x1, p.x1), std::min(root.box.lo.x2, p.x2)};
        root.box.hi = {std::max(root.box.hi.x1, p.x1), std::max(root.box.hi.x2, p.x2)};
    }
    root.items = candidates;
    const std::size_t cap = (4 * n + plan.count - 1) / plan.count;
    std::vector<Cell> leaves;
    split(data, std::move(root), cap, 0, leaves);
    std::stable_sort(leaves.begin(), leaves.end(),
                     [](const Cell& a, const Cell& b) { return a.items.size() > b.items.size(); });

    std::vector<std::size_t> out;
    out.reserve(plan.count);
    while (out.size() < plan.count) {
        for (auto& leaf : leaves) {
            if (out.size() == plan.count) break;
            if (leaf.items.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, leaf.items.size() - 1);
            const std::size_t k = pick(rng);
            out.push_back(leaf.items[k]);
            leaf.items[k] = leaf.items.back();
            leaf.items.pop_back();
        }
    }
    return out;
}

DataSet subset(const DataSet& data, const std::vector<std::size_t>& indices)
{
    DataSet out;
    out.normalization = data.normalization;
    out.constant_values = data.constant_values;
    out.points.reserve(indices.size());
    out.values.reserve(indices.size());
    for (std::size_t i : indices) {
        out.points.push_back(data.points[i]);
        out.values.push_back(data.values[i]);
    }
    return out;
}

DataSet sample(const DataSet& data, const SamplePlan& plan, std::uint64_t seed)
{
    return subset(data, sample_indices(data, plan, seed));
}

} // namespace tpsfem
