#include "tpsfem/tps.hpp"

#include "tpsfem/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace tpsfem {

double tps_kernel(double r)
{
    return r > 0.0 ? r * r * std::log(r) : 0.0;
}

double tps_gradient_factor(double r)
{
    return r > 0.0 ? 2.0 * std::log(r) + 1.0 : 0.0;
}

double tps_multiplier_kernel(double r)
{
    return -std::log(std::max(r, 1e-12)) - 4.0;
}

double TpsModel::eval(Point2 p) const
{
    double v = affine[0] + affine[1] * p.x1 + affine[2] * p.x2;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        v += weights[static_cast<Eigen::Index>(i)] * tps_kernel(distance(p, centers[i]));
    }
    return v;
}

std::array<double, 2> TpsModel::eval_grad(Point2 p) const
{
    std::array<double, 2> g{affine[1], affine[2]};
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const Point2 d = p - centers[i];
        const double f = weights[static_cast<Eigen::Index>(i)] * tps_gradient_factor(norm(d));
        g[0] += f * d.x1;
        g[1] += f * d.x2;
    }
    return g;
}

double TpsModel::eval_laplacian_proxy(Point2 p) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        v += weights[static_cast<Eigen::Index>(i)] * tps_multiplier_kernel(distance(p, centers[i]));
    }
    return v;
}

TpsSystem::TpsSystem(const DataSet& sample) : centers_(sample.points)
{
    const auto n = static_cast<Eigen::Index>(sample.size());
    if (n < 3) {
        throw Error(ErrorCode::DegenerateGeometry, "a thin plate spline needs at least 3 points");
    }
    y_ = Eigen::Map<const Eigen::VectorXd>(sample.values.data(), n);
    K_.resize(n, n);
    P_.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point2 xi = centers_[static_cast<std::size_t>(i)];
        P_(i, 0) = 1.0;
        P_(i, 1) = xi.x1;
        P_(i, 2) = xi.x2;
        K_(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            K_(i, j) = K_(j, i) = tps_kernel(distance(xi, centers_[static_cast<std::size_t>(j)]));
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(P_);
    rank_check.setThreshold(1e-10);
    if (rank_check.rank() < 3) {
        throw Error(ErrorCode::DegenerateGeometry, "sample points are collinear");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(P_);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Q1_ = Q.leftCols(3);
    R_ = qr.matrixQR().topLeftCorner(3, 3).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Q2 = Q.rightCols(n - 3);
    if (n > 3) {
        const Eigen::MatrixXd M = Q2.transpose() * K_ * Q2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
        if (eig.info() != Eigen::Success) {
            throw Error(ErrorCode::SingularSystem, "eigendecomposition of the TPS system failed");
        }
        lambda_ = eig.eigenvalues();
        Q2V_ = Q2 * eig.eigenvectors();
        z_ = Q2V_.transpose() * y_;
    } else {
        lambda_.resize(0);
        Q2V_.resize(n, 0);
        z_.resize(0);
    }
}

TpsModel TpsSystem::fit(double alpha) const
{
    if (!(alpha >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must be non-negative");
    }
    const auto n = static_cast<double>(size());
    const double shift = n * alpha;
    Eigen::VectorXd coef(lambda_.size());
    for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
        const double denom = lambda_[k] + shift;
        if (!(std::abs(denom) > 1e-300)) {
            throw Error(ErrorCode::SingularSystem, "TPS system is singular (duplicate centers?)");
        }
        coef[k] = z_[k] / denom;
    }
    TpsModel m;
    m.centers = centers_;
    m.alpha = alpha;
    m.weights = Q2V_ * coef;
    const Eigen::VectorXd rest = y_ - K_ * m.weights - shift * m.weights;
    const Eigen::Vector3d a = R_.triangularView<Eigen::Upper>().solve(Q1_.transpose() * rest);
    m.affine = {a[0], a[1], a[2]};
    return m;
}

GcvSample TpsSystem::gcv(double alpha) const
{
    const auto n = static_cast<double>(size());
    const double shift = n * alpha;
    double resid = 0.0;
    double trace = 0.0; // trace of I - H
    for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
        const double f = shift / (lambda_[k] + shift);
        resid += f * f * z_[k] * z_[k];
        trace += f;
    }
    GcvSample s{alpha, std::numeric_limits<double>::infinity(), n - trace};
    if (trace > 0.0 && std::isfinite(resid)) {
        s.score = n * resid / (trace * trace);
    }
    return s;
}

TpsModel fit_tps(const DataSet& sample, double alpha)
{
    return TpsSystem(sample).fit(alpha);
}

TpsGcvFit fit_tps_gcv(const DataSet& sample, const GcvConfig& cfg)
{
    cfg.validate();
    const TpsSystem sys(sample);
    TpsGcvFit out;
    out.selection = minimize_log_alpha(cfg.alpha_grid, cfg.refine_iters, [&](double a) { return sys.gcv(a); });
    out.model = sys.fit(out.selection.alpha);
    return out;
}

} // namespace tpsfem
