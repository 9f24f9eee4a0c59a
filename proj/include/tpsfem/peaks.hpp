#pragma once

#include "tpsfem/dataset.hpp"
#include "tpsfem/sampling.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace tpsfem {

double peaks(double x1, double x2);
std::array<double, 2> peaks_gradient(double x1, double x2);
double peaks_laplacian(double x1, double x2);

struct PeaksSpec {
    std::size_t n = 10000;
    double half_width = 2.4;  ///< points uniform in [-half_width, half_width]^2
    double sigma = 0.02;
    double test_half = 2.2;   ///< test region lies outside [-test_half, test_half]^2
    double band_half = 1.9;   ///< boundary-band sampling excludes [-band_half, band_half]^2
};

/// Noisy samples in the original (un-normalized) coordinates; the normalization
/// field is the identity. Deterministic per seed.
DataSet peaks_generate(const PeaksSpec& spec, std::uint64_t seed);

struct BoundaryAccuracyRow {
    SampleStrategy strategy = SampleStrategy::quadtree;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    double alpha = 0.0;
    double rmse_f = 0.0;
    double rmse_g1 = 0.0;
    double rmse_g2 = 0.0;
    double rmse_laplacian = 0.0; ///< proxy against the exact Laplacian
};

/// Fits a GCV-smoothed TPS to `count` sampled points per strategy and seed, and
/// measures it on the noise-free function at data points in the test region.
std::vector<BoundaryAccuracyRow> experiment_boundary_accuracy(const PeaksSpec& spec,
                                                              const std::vector<std::uint64_t>& seeds,
                                                              const std::vector<std::size_t>& counts,
                                                              const std::vector<SampleStrategy>& strategies);

} // namespace tpsfem
