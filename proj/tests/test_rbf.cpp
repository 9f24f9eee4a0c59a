#include "support.hpp"

#include "tpsfem/error.hpp"
#include "tpsfem/rbf.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace tpsfem;
using namespace tpsfem::testing;

TEST_CASE("kernel endpoints and smoothness")
{
    CHECK(buhmann_kernel(0.0) == 1.0 / 15.0);
    CHECK(buhmann_kernel(1.0) == 0.0);
    CHECK(buhmann_kernel(2.0) == 0.0);
    CHECK(std::abs(buhmann_kernel(1.0 - 1e-6)) < 1e-12);
    CHECK(wendland_kernel(0.0) == 1.0);
    CHECK(wendland_kernel(1.0) == 0.0);
    CHECK(wendland_kernel(0.5) == doctest::Approx(std::pow(0.5, 4) * 3.0));
    // Both decrease monotonically on the support.
    for (CsrbfKernel k : {CsrbfKernel::buhmann, CsrbfKernel::wendland}) {
        double prev = csrbf_kernel(k, 0.0);
        for (int i = 1; i <= 100; ++i) {
            const double v = csrbf_kernel(k, i / 100.0);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
        CHECK(parse_csrbf_kernel(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_csrbf_kernel("gauss"), Error);
}

TEST_CASE("kernel matrix equals brute force")
{
    const auto pts = random_points(300, {{0, 0}, {1, 1}}, 4);
    const double rho = 0.11;
    const Eigen::MatrixXd phi(csrbf_matrix(pts, CsrbfKernel::wendland, rho));
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double r = distance(pts[i], pts[j]) / rho;
            const double want = r < 1.0 ? wendland_kernel(r) : 0.0;
            CHECK(phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == want);
            nnz += r < 1.0;
        }
    }
    CHECK(csrbf_matrix(pts, CsrbfKernel::wendland, rho).nonZeros() == static_cast<Eigen::Index>(nnz));
    CHECK_THROWS_AS(csrbf_matrix(pts, CsrbfKernel::wendland, 0.0), Error);
}

TEST_CASE("control points snap to the nearest datum of each grid node")
{
    const DataSet data = raw_data(random_points(3000, {{0, 0}, {1, 1}}, 5), [](Point2 p) { return p.x1; });
    const double h = 0.05;
    const auto idx = snap_control_points(data, {h});
    Point2 lo = data.points[0];
    for (Point2 p : data.points) lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};

    // Brute force over grid nodes.
    std::map<std::pair<long, long>, std::size_t> want;
    for (long j = 0; j * h <= 1.0 + h; ++j) {
        for (long i = 0; i * h <= 1.0 + h; ++i) {
            const Point2 node{lo.x1 + static_cast<double>(i) * h, lo.x2 + static_cast<double>(j) * h};
            double best = h / 3.0;
            std::optional<std::size_t> pick;
            for (std::size_t k = 0; k < data.size(); ++k) {
                const double d = distance(data.points[k], node);
                if (d <= best && (!pick || d < best)) {
                    best = d;
                    pick = k;
                }
            }
            if (pick) want[{j, i}] = *pick;
        }
    }
    std::vector<std::size_t> expected;
    for (const auto& [key, k] : want) expected.push_back(k);
    CHECK(idx == expected);

    DataSet one;
    one.points = {{0.5, 0.5}};
    one.values = {1.0};
    CHECK(snap_control_points(one, {0.1}).size() == 1);
    CHECK_THROWS_AS(snap_control_points(DataSet{}, {0.1}), Error);
    CHECK_THROWS_AS(snap_control_points(one, {0.0}), Error);
}

TEST_CASE("support radius covers the requested number of points")
{
    const DataSet data = raw_data(random_points(2000, {{0, 0}, {1, 1}}, 6), [](Point2) { return 0.0; });
    const std::vector<Point2> centers = random_points(51, {{0.2, 0.2}, {0.8, 0.8}}, 7);
    const double rho = choose_rho(centers, data, 50);
    std::vector<double> kth;
    for (Point2 c : centers) {
        std::vector<double> d;
        for (Point2 p : data.points) d.push_back(distance(c, p));
        std::sort(d.begin(), d.end());
        kth.push_back(d[49]);
    }
    std::sort(kth.begin(), kth.end());
    CHECK(rho == kth[25]);
    CHECK(choose_rho(centers, data, 100) > rho);
    CHECK_THROWS_AS(choose_rho(centers, data, 0), Error);
}

TEST_CASE("ridge collocation solves the shifted system")
{
    const DataSet centers = raw_data(random_points(200, {{0, 0}, {1, 1}}, 8),
                                     [](Point2 p) { return std::sin(3 * p.x1) + p.x2 * p.x2; });
    const double rho = 0.2;
    const double alpha = 1e-4;
    const CsrbfModel m = fit_csrbf(centers, CsrbfKernel::wendland, rho, alpha);
    const Eigen::MatrixXd phi(csrbf_matrix(centers.points, CsrbfKernel::wendland, rho));
    const auto n = static_cast<Eigen::Index>(centers.size());
    const Eigen::MatrixXd M = phi + static_cast<double>(n) * alpha * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = centers.values[static_cast<std::size_t>(i)];
    const Eigen::VectorXd w = M.fullPivLu().solve(y);
    CHECK((m.weights - w).cwiseAbs().maxCoeff() <= 1e-8 * w.cwiseAbs().maxCoeff());
    const Point2 p{0.4, 0.6};
    double want = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = distance(p, centers.points[static_cast<std::size_t>(i)]) / rho;
        want += w[i] * wendland_kernel(r);
    }
    CHECK(m.eval(p) == doctest::Approx(want).epsilon(1e-8));
    CHECK(m.sparsity.dimension == centers.size());
    CHECK(m.sparsity.nonzeros == static_cast<std::size_t>(csrbf_matrix(centers.points, CsrbfKernel::wendland, rho).nonZeros()));
    CHECK(report_sparsity(m).ratio == doctest::Approx(m.sparsity.ratio));

    const CsrbfModel auto_fit = fit_csrbf(centers, CsrbfKernel::buhmann, rho, std::nullopt);
    CHECK(auto_fit.alpha > 0.0);
}

TEST_CASE("global tps baseline reports a dense kernel block")
{
    const DataSet centers = raw_data(random_points(120, {{0, 0}, {1, 1}}, 9),
                                     [](Point2 p) { return std::cos(2 * p.x1) * p.x2; });
    const GlobalTpsFit fit = fit_global_tps(centers);
    const SparsityReport s = report_sparsity(fit.model);
    CHECK(s.dimension == centers.size());
    CHECK(s.ratio == 1.0);
    CHECK(fit.model.alpha > 0.0);
}
