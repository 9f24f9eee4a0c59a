#pragma once

#include "tpsfem/gcv.hpp"
#include "tpsfem/tps.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tpsfem {

enum class CsrbfKernel { buhmann, wendland };

std::string to_string(CsrbfKernel k);
CsrbfKernel parse_csrbf_kernel(const std::string& s);

/// Kernels on the unit support; both vanish for r >= 1.
double buhmann_kernel(double r);
double wendland_kernel(double r);
double csrbf_kernel(CsrbfKernel k, double r);

struct ControlPointPlan {
    double grid_h = 0.02;
};

/// For every node of a grid of spacing h over the data bounding box, the nearest
/// data point within h/3 (nodes without one are skipped). Returns data indices in
/// grid order. Throws NoControlPoints when nothing is selected.
std::vector<std::size_t> snap_control_points(const DataSet& data, const ControlPointPlan& plan);

/// Median over centers of the distance to the k-th nearest data point, clamped
/// to the smallest positive such distance when the median is zero.
double choose_rho(const std::vector<Point2>& centers, const DataSet& data, int k_cover);

struct SparsityReport {
    std::size_t dimension = 0;
    std::size_t nonzeros = 0;
    double ratio = 0.0; ///< nonzeros / dimension^2
};

struct CsrbfModel {
    CsrbfKernel kernel = CsrbfKernel::wendland;
    std::vector<Point2> centers;
    double rho = 1.0;
    Eigen::VectorXd weights;
    double alpha = 0.0;
    SparsityReport sparsity;
    double solve_time_s = 0.0;

    double eval(Point2 p) const;
};

/// Ridge collocation (Phi + n alpha I) w = y at the centers, with Phi_ij =
/// phi(|x_i - x_j| / rho) assembled only for pairs closer than rho. Alpha is
/// chosen by stochastic GCV unless given. Throws SingularSystem.
CsrbfModel fit_csrbf(const DataSet& centers, CsrbfKernel kernel, double rho, std::optional<double> alpha,
                     const GcvConfig& gcv = {});

/// Kernel matrix pattern only (no fit).
SparseMatrix csrbf_matrix(const std::vector<Point2>& centers, CsrbfKernel kernel, double rho);

SparsityReport report_sparsity(const CsrbfModel& model);
/// Dense kernel block of a global TPS: ratio 1.
SparsityReport report_sparsity(const TpsModel& model);

struct GlobalTpsFit {
    TpsModel model;
    double solve_time_s = 0.0;
};

/// Smoothing TPS through the control points with alpha from exact GCV.
GlobalTpsFit fit_global_tps(const DataSet& centers, const GcvConfig& gcv = {});

} // namespace tpsfem
