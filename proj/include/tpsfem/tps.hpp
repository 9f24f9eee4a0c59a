#pragma once

#include "tpsfem/dataset.hpp"
#include "tpsfem/gcv.hpp"

#include <array>
#include <vector>

namespace tpsfem {

/// r^2 log r with value 0 at r = 0.
double tps_kernel(double r);
/// Radial factor 2 log r + 1 of the kernel gradient; the gradient with respect to
/// x is this factor times (x - x_i). Zero at r = 0.
double tps_gradient_factor(double r);
/// Multiplier kernel -log r - 4, with r clamped to at least 1e-12.
double tps_multiplier_kernel(double r);

/// Thin plate spline t(x) = a0 + a1 x1 + a2 x2 + sum_i w_i phi(|x - x_i|).
struct TpsModel {
    std::vector<Point2> centers;
    Eigen::VectorXd weights;
    std::array<double, 3> affine{};
    double alpha = 0.0;

    double eval(Point2 p) const;
    std::array<double, 2> eval_grad(Point2 p) const;
    /// sum_i w_i (-log r_i - 4); no affine contribution.
    double eval_laplacian_proxy(Point2 p) const;
};

/// Fits the smoothing TPS: [K + n alpha I, P; P^T, 0] [w; a] = [y; 0].
/// Throws DegenerateGeometry when the sample is collinear.
TpsModel fit_tps(const DataSet& sample, double alpha);

/// Spectral form of the TPS system for repeated fits over many alpha values.
///
/// With Q2 spanning the null space of P^T and Q2^T K Q2 = V diag(lambda) V^T,
/// every alpha costs O(n^2) and the GCV score is available in closed form.
class TpsSystem {
public:
    explicit TpsSystem(const DataSet& sample);

    std::size_t size() const { return centers_.size(); }
    TpsModel fit(double alpha) const;
    /// Exact GCV score of the smoothing fit.
    GcvSample gcv(double alpha) const;

private:
    std::vector<Point2> centers_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd K_;
    Eigen::MatrixXd P_;
    Eigen::MatrixXd Q1_;
    Eigen::MatrixXd R_;
    Eigen::MatrixXd Q2V_;     ///< Q2 V
    Eigen::VectorXd lambda_;
    Eigen::VectorXd z_;       ///< V^T Q2^T y
};

struct TpsGcvFit {
    TpsModel model;
    GcvResult selection;
};

/// Smoothing TPS with alpha chosen by exact GCV (grid scan plus refinement).
TpsGcvFit fit_tps_gcv(const DataSet& sample, const GcvConfig& cfg = {});

} // namespace tpsfem
