#include "tpsfem/rbf.hpp"

#include "tpsfem/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <unordered_map>

namespace tpsfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Factorization of Phi + shift I reused across right-hand sides.
class ShiftedSolver {
public:
    ShiftedSolver(const SparseMatrix& phi, double shift)
    {
        M_ = phi;
        for (Eigen::Index i = 0; i < M_.rows(); ++i) M_.coeffRef(i, i) += shift;
        ldlt_.compute(M_);
        if (ldlt_.info() != Eigen::Success) {
            lu_.compute(M_);
            if (lu_.info() != Eigen::Success) {
                throw Error(ErrorCode::SingularSystem, "CSRBF system factorization failed");
            }
            use_lu_ = true;
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const
    {
        Eigen::VectorXd x = use_lu_ ? Eigen::VectorXd(lu_.solve(b)) : Eigen::VectorXd(ldlt_.solve(b));
        if (!x.allFinite()) {
            throw Error(ErrorCode::SingularSystem, "CSRBF solve produced non-finite weights");
        }
        return x;
    }

private:
    SparseMatrix M_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    mutable Eigen::SparseLU<SparseMatrix> lu_;
    bool use_lu_ = false;
};

} // namespace

std::string to_string(CsrbfKernel k)
{
    return k == CsrbfKernel::buhmann ? "buhmann" : "wendland";
}

CsrbfKernel parse_csrbf_kernel(const std::string& s)
{
    if (s == "buhmann") return CsrbfKernel::buhmann;
    if (s == "wendland") return CsrbfKernel::wendland;
    throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + s + "'");
}

double buhmann_kernel(double r)
{
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) return 1.0 / 15.0;
    const double r2 = r * r;
    const double r3 = r2 * r;
    const double r4 = r2 * r2;
    return 1.0 / 15.0 + 19.0 / 6.0 * r2 - 16.0 / 3.0 * r3 + 3.0 * r4 - 16.0 / 15.0 * r4 * r + 1.0 / 6.0 * r4 * r2 +
           2.0 * r2 * std::log(r);
}

double wendland_kernel(double r)
{
    if (r >= 1.0) return 0.0;
    const double s = 1.0 - std::max(r, 0.0);
    return s * s * s * s * (4.0 * std::max(r, 0.0) + 1.0);
}

double csrbf_kernel(CsrbfKernel k, double r)
{
    return k == CsrbfKernel::buhmann ? buhmann_kernel(r) : wendland_kernel(r);
}

std::vector<std::size_t> snap_control_points(const DataSet& data, const ControlPointPlan& plan)
{
    if (!(plan.grid_h > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
    }
    if (data.size() == 0) {
        throw Error(ErrorCode::NoControlPoints, "no data");
    }
    Point2 lo = data.points[0];
    for (const Point2& p : data.points) {
        lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};
    }
    const double h = plan.grid_h;
    const double tol = h / 3.0;
    // grid node -> (distance, data index)
    std::unordered_map<std::uint64_t, std::pair<double, std::size_t>> best;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Point2 p = data.points[i];
        const auto gi = static_cast<std::int64_t>(std::llround((p.x1 - lo.x1) / h));
        const auto gj = static_cast<std::int64_t>(std::llround((p.x2 - lo.x2) / h));
        const Point2 node{lo.x1 + static_cast<double>(gi) * h, lo.x2 + static_cast<double>(gj) * h};
        const double d = distance(p, node);
        if (d > tol) continue;
        const std::uint64_t key = (static_cast<std::uint64_t>(gj) << 32) | static_cast<std::uint32_t>(gi);
        auto [it, inserted] = best.emplace(key, std::make_pair(d, i));
        if (!inserted && d < it->second.first) it->second = {d, i};
    }
    if (best.empty()) {
        throw Error(ErrorCode::NoControlPoints, "no data point lies within h/3 of a grid node");
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> ordered;
    ordered.reserve(best.size());
    for (const auto& [key, v] : best) ordered.emplace_back(key, v.second);
    std::sort(ordered.begin(), ordered.end());
    std::vector<std::size_t> out;
    out.reserve(ordered.size());
    for (const auto& [key, idx] : ordered) out.push_back(idx);
    return out;
}

double choose_rho(const std::vector<Point2>& centers, const DataSet& data, int k_cover)
{
    if (k_cover < 1) {
        throw Error(ErrorCode::InvalidArgument, "k_cover must be >= 1");
    }
    if (centers.empty() || data.size() == 0) {
        throw Error(ErrorCode::InsufficientData, "need centers and data to choose a radius");
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_cover), data.size());
    std::vector<double> kth;
    kth.reserve(centers.size());
    std::vector<double> dist(data.size());
    double min_positive = std::numeric_limits<double>::infinity();
    for (const Point2& c : centers) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            dist[i] = distance(c, data.points[i]);
            if (dist[i] > 0.0) min_positive = std::min(min_positive, dist[i]);
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
        kth.push_back(dist[k - 1]);
    }
    std::sort(kth.begin(), kth.end());
    const std::size_t m = kth.size();
    double rho = m % 2 == 1 ? kth[m / 2] : 0.5 * (kth[m / 2 - 1] + kth[m / 2]);
    if (!(rho > 0.0)) {
        rho = std::isfinite(min_positive) ? min_positive : 1.0;
    }
    return rho;
}

SparseMatrix csrbf_matrix(const std::vector<Point2>& centers, CsrbfKernel kernel, double rho)
{
    if (!(rho > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "support radius must be positive");
    }
    const std::size_t n = centers.size();
    Point2 lo = centers.empty() ? Point2{} : centers[0];
    for (const Point2& p : centers) lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};
    auto cell_of = [&](Point2 p) {
        return std::make_pair(static_cast<std::int64_t>(std::floor((p.x1 - lo.x1) / rho)),
                              static_cast<std::int64_t>(std::floor((p.x2 - lo.x2) / rho)));
    };
    auto key = [](std::int64_t i, std::int64_t j) {
        return (static_cast<std::uint64_t>(j) << 32) ^ static_cast<std::uint32_t>(i);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [ci, cj] = cell_of(centers[i]);
        cells[key(ci, cj)].push_back(i);
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [ci, cj] = cell_of(centers[i]);
        for (std::int64_t dj = -1; dj <= 1; ++dj) {
            for (std::int64_t di = -1; di <= 1; ++di) {
                if (ci + di < 0 || cj + dj < 0) continue;
                auto it = cells.find(key(ci + di, cj + dj));
                if (it == cells.end()) continue;
                for (std::size_t j : it->second) {
                    const double r = distance(centers[i], centers[j]) / rho;
                    if (r < 1.0) {
                        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), csrbf_kernel(kernel, r));
                    }
                }
            }
        }
    }
    SparseMatrix phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    phi.setFromTriplets(trip.begin(), trip.end());
    phi.makeCompressed();
    return phi;
}

double CsrbfModel::eval(Point2 p) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double r = distance(p, centers[i]) / rho;
        if (r < 1.0) v += weights[static_cast<Eigen::Index>(i)] * csrbf_kernel(kernel, r);
    }
    return v;
}

CsrbfModel fit_csrbf(const DataSet& centers, CsrbfKernel kernel, double rho, std::optional<double> alpha,
                     const GcvConfig& gcv)
{
    if (centers.size() == 0) {
        throw Error(ErrorCode::NoControlPoints, "no centers to fit");
    }
    CsrbfModel m;
    m.kernel = kernel;
    m.centers = centers.points;
    m.rho = rho;
    const SparseMatrix phi = csrbf_matrix(m.centers, kernel, rho);
    m.sparsity = {centers.size(), static_cast<std::size_t>(phi.nonZeros()),
                  static_cast<double>(phi.nonZeros()) /
                      (static_cast<double>(centers.size()) * static_cast<double>(centers.size()))};
    const auto n = static_cast<Eigen::Index>(centers.size());
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(centers.values.data(), n);
    const double nd = static_cast<double>(n);

    if (alpha) {
        m.alpha = *alpha;
    } else {
        gcv.validate();
        std::mt19937_64 rng(gcv.seed);
        std::bernoulli_distribution coin(0.5);
        Eigen::MatrixXd probes(n, gcv.probes);
        for (Eigen::Index j = 0; j < probes.cols(); ++j) {
            for (Eigen::Index i = 0; i < n; ++i) probes(i, j) = coin(rng) ? 1.0 : -1.0;
        }
        auto score = [&](double a) {
            GcvSample s{a, std::numeric_limits<double>::infinity(), 0.0};
            try {
                const ShiftedSolver solver(phi, nd * a);
                const Eigen::VectorXd w = solver.solve(y);
                const double resid = (nd * a * w).squaredNorm();
                double trace = 0.0;
                for (Eigen::Index j = 0; j < probes.cols(); ++j) {
                    const Eigen::VectorXd z = probes.col(j);
                    trace += z.dot(phi * solver.solve(z));
                }
                trace /= static_cast<double>(probes.cols());
                s.trace = trace;
                if (trace < nd) s.score = nd * resid / ((nd - trace) * (nd - trace));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularSystem) throw;
            }
            return s;
        };
        m.alpha = minimize_log_alpha(gcv.alpha_grid, gcv.refine_iters, score).alpha;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const ShiftedSolver solver(phi, nd * m.alpha);
    m.weights = solver.solve(y);
    m.solve_time_s = seconds_since(t0);
    return m;
}

SparsityReport report_sparsity(const CsrbfModel& model)
{
    return model.sparsity;
}

SparsityReport report_sparsity(const TpsModel& model)
{
    const std::size_t n = model.centers.size();
    return {n, n * n, 1.0};
}

GlobalTpsFit fit_global_tps(const DataSet& centers, const GcvConfig& gcv)
{
    GlobalTpsFit out;
    const TpsSystem sys(centers);
    const GcvResult sel = minimize_log_alpha(gcv.alpha_grid, gcv.refine_iters, [&](double a) { return sys.gcv(a); });
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = centers.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 3), static_cast<Eigen::Index>(n + 3));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 3));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < n; ++j) {
            M(ii, static_cast<Eigen::Index>(j)) = tps_kernel(distance(centers.points[i], centers.points[j]));
        }
        M(ii, ii) += static_cast<double>(n) * sel.alpha;
        const Point2 p = centers.points[i];
        const auto c = static_cast<Eigen::Index>(n);
        M(ii, c) = M(c, ii) = 1.0;
        M(ii, c + 1) = M(c + 1, ii) = p.x1;
        M(ii, c + 2) = M(c + 2, ii) = p.x2;
        rhs[ii] = centers.values[i];
    }
    const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
    out.solve_time_s = seconds_since(t0);
    if (!x.allFinite()) {
        throw Error(ErrorCode::SingularSystem, "dense TPS system is singular");
    }
    out.model.centers = centers.points;
    out.model.alpha = sel.alpha;
    out.model.weights = x.head(static_cast<Eigen::Index>(n));
    out.model.affine = {x[static_cast<Eigen::Index>(n)], x[static_cast<Eigen::Index>(n + 1)],
                        x[static_cast<Eigen::Index>(n + 2)]};
    return out;
}

} // namespace tpsfem
