#include "tpsfem/gcv.hpp"

#include "tpsfem/error.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace tpsfem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool better(const GcvSample& a, const GcvSample& b)
{
    return a.score < b.score || (a.score == b.score && a.alpha < b.alpha);
}

} // namespace

std::vector<double> GcvConfig::log_grid(double lo, double hi, int count)
{
    if (count < 1 || !(lo > 0.0) || !(hi >= lo)) {
        throw Error(ErrorCode::InvalidArgument, "invalid alpha grid bounds");
    }
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        grid[static_cast<std::size_t>(k)] = std::pow(10.0, a + t * (b - a));
    }
    return grid;
}

void GcvConfig::validate() const
{
    if (alpha_grid.empty()) {
        throw Error(ErrorCode::InvalidArgument, "alpha grid is empty");
    }
    for (std::size_t k = 0; k < alpha_grid.size(); ++k) {
        if (!(alpha_grid[k] > 0.0) || (k > 0 && !(alpha_grid[k] > alpha_grid[k - 1]))) {
            throw Error(ErrorCode::InvalidArgument, "alpha grid must be positive and strictly increasing");
        }
    }
    if (probes < 1 || refine_iters < 0) {
        throw Error(ErrorCode::InvalidArgument, "probes must be >= 1 and refine_iters >= 0");
    }
}

GcvEvaluator::GcvEvaluator(const FemSystem& fem, const BoundaryValues& bv, const GcvConfig& cfg)
    : fem_(&fem), bv_(bv)
{
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(fem.num_data());
    exact_ = cfg.exact_trace;
    if (exact_) {
        probes_ = Eigen::MatrixXd::Identity(n, n);
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::bernoulli_distribution coin(0.5);
        probes_.resize(n, cfg.probes);
        for (Eigen::Index j = 0; j < probes_.cols(); ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                probes_(i, j) = coin(rng) ? 1.0 : -1.0;
            }
        }
    }
}

GcvSample GcvEvaluator::evaluate(double alpha) const
{
    GcvSample out{alpha, kInf, kInf};
    const double n = static_cast<double>(fem_->num_data());
    try {
        SaddleSystem sys(*fem_, alpha, bv_.scaled_multiplier(alpha));
        const NodalValues v = sys.solve();
        const Eigen::VectorXd resid = fem_->y - fitted_values(*fem_, v.c);
        double trace = 0.0;
        for (Eigen::Index j = 0; j < probes_.cols(); ++j) {
            const Eigen::VectorXd z = probes_.col(j);
            const NodalValues hz = sys.solve_for(fem_->project_values(z), true);
            trace += z.dot(fitted_values(*fem_, hz.c));
        }
        if (!exact_) {
            trace /= static_cast<double>(probes_.cols());
        }
        out.trace = trace;
        if (!(trace < n)) {
            return out;
        }
        out.score = n * resid.squaredNorm() / ((n - trace) * (n - trace));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonConvergence && e.code() != ErrorCode::SingularSystem) throw;
    }
    return out;
}

double gcv_score(const FemSystem& fem, double alpha, const BoundaryValues& bv, const GcvConfig& cfg)
{
    if (!(alpha > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    }
    const GcvSample s = GcvEvaluator(fem, bv, cfg).evaluate(alpha);
    if (!(s.trace < static_cast<double>(fem.num_data()))) {
        throw Error(ErrorCode::TraceOverflow,
                    "influence trace estimate " + std::to_string(s.trace) + " reaches n = " +
                        std::to_string(fem.num_data()));
    }
    return s.score;
}

GcvResult minimize_log_alpha(const std::vector<double>& grid, int refine_iters,
                             const std::function<GcvSample(double)>& score)
{
    GcvResult result;
    std::size_t best = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        result.evaluated.push_back(score(grid[k]));
        if (k == 0 || better(result.evaluated[k], result.evaluated[best])) best = k;
    }
    GcvSample winner = result.evaluated[best];
    if (std::isfinite(winner.score) && refine_iters > 0 && grid.size() > 1) {
        double lo = std::log(grid[best == 0 ? 0 : best - 1]);
        double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
        const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - ratio * (hi - lo);
        double x2 = lo + ratio * (hi - lo);
        GcvSample f1 = score(std::exp(x1));
        GcvSample f2 = score(std::exp(x2));
        result.evaluated.push_back(f1);
        result.evaluated.push_back(f2);
        for (int it = 0; it < refine_iters; ++it) {
            if (better(f1, f2) || f1.score == f2.score) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = score(std::exp(x1));
                result.evaluated.push_back(f1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = score(std::exp(x2));
                result.evaluated.push_back(f2);
            }
        }
        for (std::size_t k = grid.size(); k < result.evaluated.size(); ++k) {
            if (better(result.evaluated[k], winner)) winner = result.evaluated[k];
        }
    }
    result.alpha = winner.alpha;
    result.score = winner.score;
    return result;
}

GcvResult select_alpha(const FemSystem& fem, const BoundaryValues& bv, const GcvConfig& cfg)
{
    const GcvEvaluator eval(fem, bv, cfg);
    return minimize_log_alpha(cfg.alpha_grid, cfg.refine_iters, [&](double a) { return eval.evaluate(a); });
}

} // namespace tpsfem
