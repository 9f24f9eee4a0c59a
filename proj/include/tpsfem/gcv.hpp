#pragma once

#include "tpsfem/saddle.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace tpsfem {

struct GcvConfig {
    std::vector<double> alpha_grid = log_grid(1e-10, 1.0, 21);
    int probes = 10;
    int refine_iters = 8;
    std::uint64_t seed = 0;
    /// Use canonical probe vectors (one per data point) for the exact trace.
    bool exact_trace = false;

    static std::vector<double> log_grid(double lo, double hi, int count);
    /// Throws InvalidArgument unless the grid is positive and strictly increasing.
    void validate() const;
};

struct GcvSample {
    double alpha = 0.0;
    double score = 0.0;
    double trace = 0.0;
};

struct GcvResult {
    double alpha = 0.0;
    double score = 0.0;
    std::vector<GcvSample> evaluated; ///< grid scan followed by refinement points
};

/// Evaluates V(alpha) = n |y - yhat|^2 / (n - tr H)^2 for one FEM system.
///
/// The influence trace uses Rademacher probes drawn once from the seed, so every
/// alpha sees the same probes. Degenerate cases score +inf. The multiplier entries
/// of `bv` are given for alpha = 1 and scaled by each candidate alpha.
class GcvEvaluator {
public:
    GcvEvaluator(const FemSystem& fem, const BoundaryValues& bv, const GcvConfig& cfg);

    GcvSample evaluate(double alpha) const;

private:
    const FemSystem* fem_;
    BoundaryValues bv_;
    Eigen::MatrixXd probes_; ///< n_data x probes
    bool exact_ = false;
};

/// Throws TraceOverflow if the trace estimate reaches n.
double gcv_score(const FemSystem& fem, double alpha, const BoundaryValues& bv, const GcvConfig& cfg);

/// Grid scan followed by golden-section refinement on log alpha around the grid
/// minimiser. Ties go to the smaller alpha.
GcvResult select_alpha(const FemSystem& fem, const BoundaryValues& bv, const GcvConfig& cfg);

/// Shared scan-and-refine search over any scoring function of alpha.
GcvResult minimize_log_alpha(const std::vector<double>& grid, int refine_iters,
                             const std::function<GcvSample(double)>& score);

} // namespace tpsfem
