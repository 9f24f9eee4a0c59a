#include "tpsfem/peaks.hpp"

#include "tpsfem/tps.hpp"

#include <cmath>
#include <random>

namespace tpsfem {

namespace {

// Each term is P(x) exp(Q(x)) with polynomial P and quadratic Q.
struct Term {
    double p;
    std::array<double, 2> dp;
    double lap_p;
    double q;
    std::array<double, 2> dq;
    double lap_q;
};

std::array<Term, 3> terms(double x, double y)
{
    const double y5 = y * y * y * y * y;
    return {{
        {3.0 * (1 - x) * (1 - x), {-6.0 * (1 - x), 0.0}, 6.0,
         -x * x - (y + 1) * (y + 1), {-2.0 * x, -2.0 * (y + 1)}, -4.0},
        {-(x / 5.0 - x * x * x - y5) * 10.0, {-(1.0 / 5.0 - 3.0 * x * x) * 10.0, 50.0 * y * y * y * y},
         60.0 * x + 200.0 * y * y * y, -x * x - y * y, {-2.0 * x, -2.0 * y}, -4.0},
        {-1.0 / 3.0, {0.0, 0.0}, 0.0, -(x + 1) * (x + 1) - y * y, {-2.0 * (x + 1), -2.0 * y}, -4.0},
    }};
}

double rms(double sum_sq, std::size_t n)
{
    return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n));
}

} // namespace

double peaks(double x1, double x2)
{
    double v = 0.0;
    for (const Term& t : terms(x1, x2)) v += t.p * std::exp(t.q);
    return v;
}

std::array<double, 2> peaks_gradient(double x1, double x2)
{
    std::array<double, 2> g{};
    for (const Term& t : terms(x1, x2)) {
        const double e = std::exp(t.q);
        for (std::size_t j = 0; j < 2; ++j) g[j] += (t.dp[j] + t.p * t.dq[j]) * e;
    }
    return g;
}

double peaks_laplacian(double x1, double x2)
{
    double v = 0.0;
    for (const Term& t : terms(x1, x2)) {
        const double grad_dot = t.dp[0] * t.dq[0] + t.dp[1] * t.dq[1];
        const double dq2 = t.dq[0] * t.dq[0] + t.dq[1] * t.dq[1];
        v += (t.lap_p + 2.0 * grad_dot + t.p * (t.lap_q + dq2)) * std::exp(t.q);
    }
    return v;
}

DataSet peaks_generate(const PeaksSpec& spec, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-spec.half_width, spec.half_width);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    DataSet d;
    d.points.reserve(spec.n);
    d.values.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = coord(rng);
        const double y = coord(rng);
        d.points.push_back({x, y});
        d.values.push_back(peaks(x, y) + (spec.sigma > 0.0 ? noise(rng) : 0.0));
    }
    return d;
}

std::vector<BoundaryAccuracyRow> experiment_boundary_accuracy(const PeaksSpec& spec,
                                                              const std::vector<std::uint64_t>& seeds,
                                                              const std::vector<std::size_t>& counts,
                                                              const std::vector<SampleStrategy>& strategies)
{
    std::vector<BoundaryAccuracyRow> rows;
    const Rect band{{-spec.band_half, -spec.band_half}, {spec.band_half, spec.band_half}};
    for (std::uint64_t seed : seeds) {
        const DataSet data = peaks_generate(spec, seed);
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const Point2 p = data.points[i];
            if (std::abs(p.x1) > spec.test_half || std::abs(p.x2) > spec.test_half) test.push_back(i);
        }
        for (SampleStrategy strategy : strategies) {
            for (std::size_t count : counts) {
                const DataSet s = sample(data, {strategy, count, band}, seed);
                const TpsGcvFit fit = fit_tps_gcv(s);
                BoundaryAccuracyRow row{strategy, count, seed, fit.selection.alpha, 0, 0, 0, 0};
                double ef = 0, eg1 = 0, eg2 = 0, el = 0;
                for (std::size_t i : test) {
                    const Point2 p = data.points[i];
                    const auto g = fit.model.eval_grad(p);
                    const auto gt = peaks_gradient(p.x1, p.x2);
                    ef += std::pow(fit.model.eval(p) - peaks(p.x1, p.x2), 2);
                    eg1 += std::pow(g[0] - gt[0], 2);
                    eg2 += std::pow(g[1] - gt[1], 2);
                    el += std::pow(fit.model.eval_laplacian_proxy(p) - peaks_laplacian(p.x1, p.x2), 2);
                }
                row.rmse_f = rms(ef, test.size());
                row.rmse_g1 = rms(eg1, test.size());
                row.rmse_g2 = rms(eg2, test.size());
                row.rmse_laplacian = rms(el, test.size());
                rows.push_back(row);
            }
        }
    }
    return rows;
}

} // namespace tpsfem
