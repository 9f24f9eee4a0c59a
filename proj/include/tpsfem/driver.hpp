#pragma once

#include "tpsfem/boundary.hpp"
#include "tpsfem/domain.hpp"
#include "tpsfem/gcv.hpp"
#include "tpsfem/indicators.hpp"
#include "tpsfem/sampling.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tpsfem {

enum class RefineMode { uniform, adaptive };

std::string to_string(RefineMode m);
RefineMode parse_refine_mode(const std::string& s);
std::string to_string(DomainKind k);

struct RunConfig {
    DomainKind domain = DomainKind::square;
    std::optional<Polygon> polygon;      ///< meshed instead of trimming when set
    int initial_level = 0;               ///< uniform levels of the initial square mesh
    int trim_level = 1;                  ///< square mesh level trimmed to the data
    RefineMode refine = RefineMode::adaptive;
    IndicatorKind indicator = IndicatorKind::recovery;
    BoundaryKind boundary = BoundaryKind::nodal_average;
    double constant_value = 0.0;
    int max_iters = 0;                   ///< 0 selects the default for domain and mode
    std::optional<double> rmse_tolerance;
    bool stop_on_stagnation = true;
    double stagnation_fraction = 0.1;
    int stagnation_count = 2;
    std::optional<double> fixed_alpha;   ///< skips GCV when set
    GcvConfig gcv;
    SamplePlan tps_sample{SampleStrategy::quadtree, 300, {}};
    double marking_gamma = 0.5;
    double near_boundary_radius = 0.005;
    std::uint64_t seed = 0;

    int resolved_max_iters() const;
    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    std::size_t nodes = 0;
    std::size_t triangles = 0;
    double alpha = 0.0;
    double gcv_score = 0.0;
    double rmse = 0.0;
    double max_residual = 0.0;
    double solve_time_s = 0.0;
    std::optional<double> near_boundary_ratio; ///< empty when the mesh has no interior node
    std::size_t marked_edges = 0;
    std::size_t refined_edges = 0;
    std::size_t waves = 0;
    std::size_t dropped_points = 0;
    std::string solver;
    double relative_residual = 0.0;
    std::vector<std::size_t> indicator_histogram; ///< 10 bins of value / max

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct RunResult {
    std::shared_ptr<const Smoother> smoother;
    std::vector<IterationRecord> records;
    std::string stop_reason;
    std::optional<TpsModel> boundary_tps;
};

/// Runs the iterative fit-indicate-refine loop on normalized data. The observer
/// sees every record as soon as it is complete. Solver errors are rethrown with
/// the iteration index in the message.
RunResult run(const DataSet& data, const RunConfig& cfg,
              const std::function<void(const IterationRecord&)>& observer = {});

/// Initial mesh for a configuration.
TriMesh initial_mesh(const DataSet& data, const RunConfig& cfg);

/// Bisects the marked edges in order, skipping edges already consumed by earlier
/// recursive refinement, and stops once the mesh holds `node_limit` nodes.
/// Returns the number of edges bisected.
std::size_t refine_wave(TriMesh& mesh, const std::vector<EdgeKey>& marked,
                        std::size_t node_limit = std::numeric_limits<std::size_t>::max());

} // namespace tpsfem
