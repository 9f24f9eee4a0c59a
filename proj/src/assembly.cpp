#include "tpsfem/assembly.hpp"

#include "tpsfem/error.hpp"
#include "tpsfem/locate.hpp"

#include <cmath>

namespace tpsfem {

namespace {

constexpr double kMinArea = 1e-14;

double checked_area(const TriMesh& mesh, TriId t)
{
    const double a = mesh.area(t);
    if (!(a >= kMinArea)) {
        throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " has area " + std::to_string(a));
    }
    return a;
}

} // namespace

std::array<std::array<double, 3>, 2> basis_gradients(const TriMesh& mesh, TriId t)
{
    const auto c = mesh.corners(t);
    const double det = orient(c[0], c[1], c[2]);
    std::array<std::array<double, 3>, 2> g{};
    for (int k = 0; k < 3; ++k) {
        const Point2 a = c[static_cast<std::size_t>((k + 1) % 3)];
        const Point2 b = c[static_cast<std::size_t>((k + 2) % 3)];
        // b_k vanishes on edge (a, b); its gradient is the inward edge normal
        g[0][static_cast<std::size_t>(k)] = (a.x2 - b.x2) / det;
        g[1][static_cast<std::size_t>(k)] = (b.x1 - a.x1) / det;
    }
    return g;
}

BasisValues basis_eval(const TriMesh& mesh, TriId t, Point2 p)
{
    const auto c = mesh.corners(t);
    BasisValues out;
    const auto l = barycentric(c[0], c[1], c[2], p);
    if (l[0] < -1e-10 || l[1] < -1e-10 || l[2] < -1e-10) {
        throw Error(ErrorCode::OutsideTriangle, "point is outside triangle " + std::to_string(t));
    }
    out.value = l;
    out.grad = basis_gradients(mesh, t);
    return out;
}

SparseMatrix assemble_L(const TriMesh& mesh)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const double area = checked_area(mesh, t);
        const auto g = basis_gradients(mesh, t);
        const auto& v = mesh.triangle(t).v;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t q = 0; q < 3; ++q) {
                trip.emplace_back(v[p], v[q], area * (g[0][p] * g[0][q] + g[1][p] * g[1][q]));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    SparseMatrix L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

SparseMatrix assemble_G(const TriMesh& mesh, int j)
{
    if (j != 1 && j != 2) {
        throw Error(ErrorCode::InvalidArgument, "gradient direction must be 1 or 2");
    }
    const auto dir = static_cast<std::size_t>(j - 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.num_triangles() * 9);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const double area = checked_area(mesh, t);
        const auto g = basis_gradients(mesh, t);
        const auto& v = mesh.triangle(t).v;
        for (std::size_t p = 0; p < 3; ++p) {
            for (std::size_t q = 0; q < 3; ++q) {
                // integral of b_p over the triangle is area / 3
                trip.emplace_back(v[p], v[q], area / 3.0 * g[dir][q]);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    SparseMatrix G(n, n);
    G.setFromTriplets(trip.begin(), trip.end());
    return G;
}

DataProjection project_data(const TriMesh& mesh, const DataSet& data)
{
    PointLocator locator(mesh);
    DataProjection proj;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(data.size() * 3);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto t = locator.locate(data.points[i]);
        if (!t) {
            ++proj.dropped;
            continue;
        }
        const auto row = static_cast<int>(proj.used.size());
        const auto c = mesh.corners(*t);
        const auto l = barycentric(c[0], c[1], c[2], data.points[i]);
        const auto& v = mesh.triangle(*t).v;
        for (std::size_t k = 0; k < 3; ++k) {
            trip.emplace_back(row, v[k], l[k]);
        }
        proj.used.push_back(i);
        proj.triangle.push_back(*t);
    }
    proj.basis.resize(static_cast<Eigen::Index>(proj.used.size()), static_cast<Eigen::Index>(mesh.num_nodes()));
    proj.basis.setFromTriplets(trip.begin(), trip.end());
    return proj;
}

std::pair<SparseMatrix, Eigen::VectorXd> assemble_A_d(const TriMesh& mesh, const DataSet& data)
{
    DataProjection proj = project_data(mesh, data);
    if (proj.used.empty()) {
        throw Error(ErrorCode::NoDataInDomain, "no data point lies inside the mesh");
    }
    const double inv_n = 1.0 / static_cast<double>(proj.used.size());
    Eigen::VectorXd y(static_cast<Eigen::Index>(proj.used.size()));
    for (std::size_t k = 0; k < proj.used.size(); ++k) {
        y[static_cast<Eigen::Index>(k)] = data.values[proj.used[k]];
    }
    SparseMatrix B = proj.basis;
    SparseMatrix A = (B.transpose() * B) * inv_n;
    Eigen::VectorXd d = (B.transpose() * y) * inv_n;
    return {std::move(A), std::move(d)};
}

Eigen::VectorXd FemSystem::project_values(const Eigen::VectorXd& values) const
{
    return (projection.basis.transpose() * values) / static_cast<double>(num_data());
}

FemSystem assemble_system(std::shared_ptr<const TriMesh> mesh, const DataSet& data)
{
    FemSystem fem;
    fem.mesh = std::move(mesh);
    fem.projection = project_data(*fem.mesh, data);
    if (fem.projection.used.empty()) {
        throw Error(ErrorCode::NoDataInDomain, "no data point lies inside the mesh");
    }
    fem.y.resize(static_cast<Eigen::Index>(fem.projection.used.size()));
    for (std::size_t k = 0; k < fem.projection.used.size(); ++k) {
        fem.y[static_cast<Eigen::Index>(k)] = data.values[fem.projection.used[k]];
    }
    const double inv_n = 1.0 / static_cast<double>(fem.num_data());
    SparseMatrix B = fem.projection.basis;
    fem.A = (B.transpose() * B) * inv_n;
    fem.d = fem.project_values(fem.y);
    fem.L = assemble_L(*fem.mesh);
    fem.G1 = assemble_G(*fem.mesh, 1);
    fem.G2 = assemble_G(*fem.mesh, 2);
    return fem;
}

} // namespace tpsfem
