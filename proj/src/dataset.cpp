#include "tpsfem/dataset.hpp"

#include "tpsfem/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace tpsfem {

namespace {

constexpr double kLo = 0.2;
constexpr double kHi = 0.8;

bool parse_double(std::string_view tok, double& out)
{
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
    if (tok.empty()) {
        return false;
    }
    if (tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == ';')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' && line[j] != ';') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

DataSet normalize(const std::vector<Point2>& points, const std::vector<double>& values)
{
    if (points.empty() || points.size() != values.size()) {
        throw Error(ErrorCode::InvalidArgument, "need equally many points and values (n >= 1)");
    }
    Point2 lo = points.front();
    Point2 hi = points.front();
    for (const auto& p : points) {
        lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};
        hi = {std::max(hi.x1, p.x1), std::max(hi.x2, p.x2)};
    }
    const double w = hi.x1 - lo.x1;
    const double h = hi.x2 - lo.x2;
    if (!(w > 0.0) || !(h > 0.0)) {
        throw Error(ErrorCode::DegenerateExtent, "bounding box of the predictors has zero width");
    }
    const double longer = std::max(w, h);

    DataSet ds;
    Normalization& nm = ds.normalization;
    nm.scale = (kHi - kLo) / longer;
    nm.origin = lo;
    // centre the shorter axis inside [0.2, 0.8]
    nm.offset = {kLo + 0.5 * (longer - w) * nm.scale, kLo + 0.5 * (longer - h) * nm.scale};

    const auto [ymin_it, ymax_it] = std::minmax_element(values.begin(), values.end());
    nm.y_min = *ymin_it;
    nm.y_range = *ymax_it - *ymin_it;
    ds.constant_values = !(nm.y_range > 0.0);
    if (ds.constant_values) {
        nm.y_range = 0.0;
    }

    ds.points.reserve(points.size());
    ds.values.reserve(values.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        ds.points.push_back(nm.to_normalized(points[i]));
        ds.values.push_back(nm.value_to_normalized(values[i]));
    }
    ds.spacing = max_nearest_neighbor_gap(ds.points);
    return ds;
}

void read_xyz(const std::filesystem::path& path, std::vector<Point2>& points, std::vector<double>& values)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    points.clear();
    values.clear();
    std::string line;
    std::size_t lineno = 0;
    bool any_numeric = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        auto fields = split_fields(sv);
        if (fields.empty()) {
            continue;
        }
        double v[3];
        bool ok = fields.size() >= 3;
        for (std::size_t k = 0; ok && k < 3; ++k) {
            ok = parse_double(fields[k], v[k]) && std::isfinite(v[k]);
        }
        if (!ok) {
            if (!any_numeric && lineno == 1) {
                continue; // header line
            }
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno) +
                                                   ": expected three numeric columns");
        }
        any_numeric = true;
        points.push_back({v[0], v[1]});
        values.push_back(v[2]);
    }
    if (points.empty()) {
        throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
    }
}

void write_xyz(const std::filesystem::path& path, const std::vector<Point2>& points,
               const std::vector<double>& values)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "x1,x2,y\n" << std::setprecision(17);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << points[i].x1 << ',' << points[i].x2 << ',' << values[i] << '\n';
    }
}

DataSet ingest_csv(const std::filesystem::path& path)
{
    std::vector<Point2> pts;
    std::vector<double> vals;
    read_xyz(path, pts, vals);
    return normalize(pts, vals);
}

double max_nearest_neighbor_gap(const std::vector<Point2>& points)
{
    const std::size_t n = points.size();
    if (n < 2) {
        return 0.0;
    }
    Point2 lo = points.front();
    Point2 hi = points.front();
    for (const auto& p : points) {
        lo = {std::min(lo.x1, p.x1), std::min(lo.x2, p.x2)};
        hi = {std::max(hi.x1, p.x1), std::max(hi.x2, p.x2)};
    }
    const double area = std::max((hi.x1 - lo.x1) * (hi.x2 - lo.x2), 1e-300);
    const double cell = std::max(std::sqrt(area / static_cast<double>(n)), 1e-12);
    auto key = [](std::int64_t i, std::int64_t j) {
        return static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(j);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(n);
    auto cell_of = [&](Point2 p) {
        return std::make_pair(static_cast<std::int64_t>(std::floor((p.x1 - lo.x1) / cell)),
                              static_cast<std::int64_t>(std::floor((p.x2 - lo.x2) / cell)));
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto [ci, cj] = cell_of(points[i]);
        grid[key(ci, cj)].push_back(i);
    }
    const auto max_ring = static_cast<std::int64_t>(
        std::ceil(std::max(hi.x1 - lo.x1, hi.x2 - lo.x2) / cell)) + 1;
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto [ci, cj] = cell_of(points[i]);
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t r = 0; r <= max_ring; ++r) {
            if (best <= static_cast<double>(r - 1) * cell) {
                break;
            }
            for (std::int64_t di = -r; di <= r; ++di) {
                for (std::int64_t dj = -r; dj <= r; ++dj) {
                    if (std::max(std::abs(di), std::abs(dj)) != r) continue;
                    auto it = grid.find(key(ci + di, cj + dj));
                    if (it == grid.end()) continue;
                    for (std::size_t j : it->second) {
                        if (j != i) best = std::min(best, distance(points[i], points[j]));
                    }
                }
            }
        }
        if (std::isfinite(best)) {
            gap = std::max(gap, best);
        }
    }
    return gap;
}

} // namespace tpsfem
