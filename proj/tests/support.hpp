#pragma once

#include "tpsfem/assembly.hpp"
#include "tpsfem/dataset.hpp"
#include "tpsfem/domain.hpp"
#include "tpsfem/mesh.hpp"
#include "tpsfem/peaks.hpp"
#include "tpsfem/saddle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace tpsfem::testing {

/// f(x) = a0 + a1 x1 + a2 x2.
struct Affine {
    double a0 = 0.3;
    double a1 = 0.5;
    double a2 = -0.2;
    double operator()(Point2 p) const { return a0 + a1 * p.x1 + a2 * p.x2; }
};

inline std::vector<Point2> random_points(std::size_t n, Rect box, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u1(box.lo.x1, box.hi.x1);
    std::uniform_real_distribution<double> u2(box.lo.x2, box.hi.x2);
    std::vector<Point2> pts(n);
    for (auto& p : pts) {
        p.x1 = u1(rng);
        p.x2 = u2(rng);
    }
    return pts;
}

/// Data set without normalization (points already in the unit square).
inline DataSet raw_data(std::vector<Point2> pts, const std::function<double(Point2)>& f)
{
    DataSet d;
    d.points = std::move(pts);
    for (Point2 p : d.points) d.values.push_back(f(p));
    return d;
}

inline DataSet affine_data(std::size_t n, std::uint64_t seed, Affine f = {}, Rect box = {{0.0, 0.0}, {1.0, 1.0}})
{
    return raw_data(random_points(n, box, seed), f);
}

/// Boundary values of the affine function: exact value and gradient, zero multiplier.
inline BoundaryValues affine_boundary(const TriMesh& mesh, Affine f)
{
    BoundaryValues bv = BoundaryValues::zeros(mesh);
    for (std::size_t k = 0; k < bv.nodes.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        bv.c[kk] = f(mesh.node(bv.nodes[k]));
        bv.g1[kk] = f.a1;
        bv.g2[kk] = f.a2;
    }
    return bv;
}

inline BoundaryValues random_boundary(const TriMesh& mesh, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BoundaryValues bv = BoundaryValues::zeros(mesh);
    for (Eigen::VectorXd* v : {&bv.c, &bv.g1, &bv.g2, &bv.w}) {
        for (Eigen::Index i = 0; i < v->size(); ++i) (*v)[i] = u(rng);
    }
    return bv;
}

/// Normalized peaks data, optionally restricted to the raw-coordinate disk of
/// the given radius.
inline DataSet peaks_data(std::uint64_t seed, std::size_t n = 10000, double disk_radius = 0.0)
{
    PeaksSpec spec;
    spec.n = n;
    const DataSet raw = peaks_generate(spec, seed);
    std::vector<Point2> pts;
    std::vector<double> vals;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (disk_radius > 0.0 && norm(raw.points[i]) > disk_radius) continue;
        pts.push_back(raw.points[i]);
        vals.push_back(raw.values[i]);
    }
    return normalize(pts, vals);
}

/// Dense solve of the full (unreduced) saddle system with boundary rows replaced
/// by identity rows. Unknown blocks are [c; g1; g2; w], each of length n.
inline NodalValues dense_saddle_oracle(const FemSystem& fem, double alpha, const BoundaryValues& bv)
{
    const TriMesh& mesh = *fem.mesh;
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    const Eigen::MatrixXd A(fem.A);
    const Eigen::MatrixXd L(fem.L);
    const Eigen::MatrixXd G1(fem.G1);
    const Eigen::MatrixXd G2(fem.G2);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * n);
    K.block(0, 0, n, n) = A;
    K.block(0, 3 * n, n, n) = L;
    K.block(n, n, n, n) = alpha * L;
    K.block(n, 3 * n, n, n) = -G1;
    K.block(2 * n, 2 * n, n, n) = alpha * L;
    K.block(2 * n, 3 * n, n, n) = -G2;
    K.block(3 * n, 0, n, n) = L;
    K.block(3 * n, n, n, n) = -G1.transpose();
    K.block(3 * n, 2 * n, n, n) = -G2.transpose();
    rhs.head(n) = fem.d;
    for (std::size_t k = 0; k < bv.nodes.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const Eigen::Index p = bv.nodes[k];
        const std::array<double, 4> vals{bv.c[kk], bv.g1[kk], bv.g2[kk], bv.w[kk]};
        for (Eigen::Index b = 0; b < 4; ++b) {
            K.row(b * n + p).setZero();
            K(b * n + p, b * n + p) = 1.0;
            rhs[b * n + p] = vals[static_cast<std::size_t>(b)];
        }
    }
    const Eigen::VectorXd x = K.fullPivLu().solve(rhs);
    NodalValues v = NodalValues::zeros(static_cast<std::size_t>(n));
    v.c = x.segment(0, n);
    v.g1 = x.segment(n, n);
    v.g2 = x.segment(2 * n, n);
    v.w = x.segment(3 * n, n);
    return v;
}

inline double max_abs_diff(const NodalValues& a, const NodalValues& b)
{
    return std::max({(a.c - b.c).cwiseAbs().maxCoeff(), (a.g1 - b.g1).cwiseAbs().maxCoeff(),
                     (a.g2 - b.g2).cwiseAbs().maxCoeff(), (a.w - b.w).cwiseAbs().maxCoeff()});
}

inline double max_abs(const NodalValues& a)
{
    return std::max({a.c.cwiseAbs().maxCoeff(), a.g1.cwiseAbs().maxCoeff(), a.g2.cwiseAbs().maxCoeff(),
                     a.w.cwiseAbs().maxCoeff()});
}

/// Interior angles of triangle t in degrees.
inline std::array<double, 3> triangle_angles(const TriMesh& mesh, TriId t)
{
    const auto c = mesh.corners(t);
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k) {
        const Point2 u = c[static_cast<std::size_t>((k + 1) % 3)] - c[static_cast<std::size_t>(k)];
        const Point2 v = c[static_cast<std::size_t>((k + 2) % 3)] - c[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(k)] = std::acos(dot(u, v) / (norm(u) * norm(v))) * 180.0 / M_PI;
    }
    return out;
}

inline double total_area(const TriMesh& mesh)
{
    double a = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) a += mesh.area(static_cast<TriId>(t));
    return a;
}

} // namespace tpsfem::testing
