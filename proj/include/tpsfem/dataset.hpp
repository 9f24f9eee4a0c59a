#pragma once

#include "tpsfem/geometry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tpsfem {

/// Affine map between original survey coordinates and the normalized frame.
struct Normalization {
    Point2 origin{0.0, 0.0}; ///< original coordinate mapped to `offset`
    Point2 offset{0.0, 0.0};
    double scale = 1.0;      ///< normalized = offset + scale * (original - origin)
    double y_min = 0.0;
    double y_range = 1.0;    ///< zero range maps every value to 0

    Point2 to_normalized(Point2 p) const { return offset + scale * (p - origin); }
    Point2 to_original(Point2 p) const { return origin + (1.0 / scale) * (p - offset); }
    double value_to_normalized(double y) const { return y_range > 0 ? (y - y_min) / y_range : 0.0; }
    double value_to_original(double v) const { return y_min + v * y_range; }
};

/// Scattered predictor/response pairs.
struct DataSet {
    std::vector<Point2> points;
    std::vector<double> values;
    Normalization normalization;
    double spacing = 0.0;          ///< d_X: largest nearest-neighbour distance
    bool constant_values = false;  ///< response column had zero range

    std::size_t size() const { return points.size(); }
};

/// Normalizes raw coordinates: x scaled into [0.2,0.8]^2 keeping the aspect ratio
/// (longer axis spans the full interval, shorter axis centred) and y min-max scaled
/// to [0,1]. Throws DegenerateExtent if the bounding box has zero width or height.
DataSet normalize(const std::vector<Point2>& points, const std::vector<double>& values);

/// Reads "x1,x2,y[,...]" rows (comma or whitespace separated, '#' comments and a
/// non-numeric header line allowed) and normalizes them.
DataSet ingest_csv(const std::filesystem::path& path);

/// Raw (un-normalized) rows of a CSV file.
void read_xyz(const std::filesystem::path& path, std::vector<Point2>& points, std::vector<double>& values);

void write_xyz(const std::filesystem::path& path, const std::vector<Point2>& points,
               const std::vector<double>& values);

/// Largest distance from a point to its nearest neighbour.
double max_nearest_neighbor_gap(const std::vector<Point2>& points);

} // namespace tpsfem
