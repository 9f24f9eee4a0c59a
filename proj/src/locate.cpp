#include "tpsfem/locate.hpp"

#include <algorithm>
#include <cmath>

namespace tpsfem {

namespace {
constexpr std::size_t kMaxBinsPerAxis = 4096;
}

bool triangle_contains(const TriMesh& mesh, TriId t, Point2 p, double tol)
{
    const auto c = mesh.corners(t);
    const auto l = barycentric(c[0], c[1], c[2], p);
    return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh)
{
    const auto& nodes = mesh.nodes();
    if (nodes.empty() || mesh.num_triangles() == 0) {
        offsets_.assign(2, 0);
        return;
    }
    Point2 lo = nodes.front();
    Point2 hi = nodes.front();
    for (const auto& p : nodes) {
        lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};
        hi = {std::max(hi.x1, p.x1), std::max(hi.x2, p.x2)};
    }
    const double w = std::max(hi.x1 - lo.x1, 1e-300);
    const double h = std::max(hi.x2 - lo.x2, 1e-300);
    // about one triangle per bin on average
    bin_size_ = std::sqrt(w * h / static_cast<double>(mesh.num_triangles()));
    bin_size_ = std::max({bin_size_, w / kMaxBinsPerAxis, h / kMaxBinsPerAxis});
    lo_ = lo;
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / bin_size_)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(h / bin_size_)));

    const double pad = 1e-12 * std::max(w, h);
    std::vector<std::array<std::size_t, 4>> ranges(mesh.num_triangles());
    std::vector<std::size_t> counts(nx_ * ny_ + 1, 0);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto c = mesh.corners(t);
        const double x0 = std::min({c[0].x1, c[1].x1, c[2].x1}) - pad;
        const double x1 = std::max({c[0].x1, c[1].x1, c[2].x1}) + pad;
        const double y0 = std::min({c[0].x2, c[1].x2, c[2].x2}) - pad;
        const double y1 = std::max({c[0].x2, c[1].x2, c[2].x2}) + pad;
        auto clampi = [](double v, std::size_t n) {
            if (v < 0) return std::size_t{0};
            return std::min(n - 1, static_cast<std::size_t>(v));
        };
        auto& r = ranges[static_cast<std::size_t>(t)];
        r = {clampi((x0 - lo_.x1) / bin_size_, nx_), clampi((x1 - lo_.x1) / bin_size_, nx_),
             clampi((y0 - lo_.x2) / bin_size_, ny_), clampi((y1 - lo_.x2) / bin_size_, ny_)};
        for (std::size_t j = r[2]; j <= r[3]; ++j) {
            for (std::size_t i = r[0]; i <= r[1]; ++i) {
                ++counts[j * nx_ + i + 1];
            }
        }
    }
    for (std::size_t k = 1; k < counts.size(); ++k) {
        counts[k] += counts[k - 1];
    }
    offsets_ = counts;
    items_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // triangles are inserted in increasing id order, so bins are sorted
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto& r = ranges[static_cast<std::size_t>(t)];
        for (std::size_t j = r[2]; j <= r[3]; ++j) {
            for (std::size_t i = r[0]; i <= r[1]; ++i) {
                items_[fill[j * nx_ + i]++] = t;
            }
        }
    }
}

std::size_t PointLocator::bin_of(double x, double y) const
{
    auto idx = [this](double v, double lo, std::size_t n) {
        const double f = (v - lo) / bin_size_;
        if (f < 0) return std::size_t{0};
        return std::min(n - 1, static_cast<std::size_t>(f));
    };
    return idx(y, lo_.x2, ny_) * nx_ + idx(x, lo_.x1, nx_);
}

std::optional<TriId> PointLocator::locate(Point2 p) const
{
    if (items_.empty() || !std::isfinite(p.x1) || !std::isfinite(p.x2)) {
        return std::nullopt;
    }
    const double fx = (p.x1 - lo_.x1) / bin_size_;
    const double fy = (p.x2 - lo_.x2) / bin_size_;
    const double slack = 1e-9;
    if (fx < -slack || fy < -slack || fx > static_cast<double>(nx_) + slack ||
        fy > static_cast<double>(ny_) + slack) {
        return std::nullopt;
    }
    const std::size_t b = bin_of(p.x1, p.x2);
    for (std::size_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
        if (triangle_contains(*mesh_, items_[k], p)) {
            return items_[k];
        }
    }
    return std::nullopt;
}

std::optional<TriId> locate(const TriMesh& mesh, Point2 p)
{
    return PointLocator(mesh).locate(p);
}

} // namespace tpsfem
