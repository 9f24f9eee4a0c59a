#pragma once

#include "tpsfem/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tpsfem {

enum class SampleStrategy { random, quadtree, quadtree_boundary_band };

std::string to_string(SampleStrategy s);
SampleStrategy parse_sample_strategy(const std::string& s);

struct SamplePlan {
    SampleStrategy strategy = SampleStrategy::quadtree;
    std::size_t count = 300;
    /// Inner rectangle whose points are excluded by the boundary-band strategy.
    Rect band{{0.0, 0.0}, {0.0, 0.0}};
};

/// Indices of the selected points, deterministic for a given seed.
///
/// The quadtree splits cells until each leaf holds at most ceil(4 n / count)
/// candidates, then draws one random point per leaf in rounds, largest leaves
/// first. Throws InsufficientData if fewer candidates than `count` exist and
/// InvalidArgument for count < 10 (unless count equals the candidate total).
std::vector<std::size_t> sample_indices(const DataSet& data, const SamplePlan& plan, std::uint64_t seed);

/// Subset of `data` holding the selected points (normalization is copied).
DataSet sample(const DataSet& data, const SamplePlan& plan, std::uint64_t seed);

DataSet subset(const DataSet& data, const std::vector<std::size_t>& indices);

} // namespace tpsfem
