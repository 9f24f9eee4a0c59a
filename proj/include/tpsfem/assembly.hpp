#pragma once

#include "tpsfem/dataset.hpp"
#include "tpsfem/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <memory>
#include <vector>

namespace tpsfem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Linear basis functions of one triangle evaluated at a point.
struct BasisValues {
    std::array<double, 3> value{};
    /// grad[j][k] = d b_k / d x_{j+1}; constant over the triangle.
    std::array<std::array<double, 3>, 2> grad{};
};

/// Throws OutsideTriangle if p is not in the closed triangle (tolerance 1e-10).
BasisValues basis_eval(const TriMesh& mesh, TriId t, Point2 p);

/// Gradients of the three basis functions of triangle t.
std::array<std::array<double, 3>, 2> basis_gradients(const TriMesh& mesh, TriId t);

/// L_pq = integral of grad b_p . grad b_q. Throws DegenerateTriangle for area < 1e-14.
SparseMatrix assemble_L(const TriMesh& mesh);

/// (G_j)_pq = integral of b_p d_j b_q, j in {1, 2}.
SparseMatrix assemble_G(const TriMesh& mesh, int j);

/// Sparse evaluation operator: row i holds b(x_i) for every located data point.
struct DataProjection {
    SparseRowMatrix basis;                 ///< n_used x n_nodes
    std::vector<std::size_t> used;         ///< indices into the data set
    std::vector<TriId> triangle;           ///< containing triangle per used point
    std::size_t dropped = 0;               ///< points outside the mesh
};

DataProjection project_data(const TriMesh& mesh, const DataSet& data);

/// A = (1/n) sum b(x_i) b(x_i)^T and d = (1/n) sum b(x_i) y_i over located points
/// (n counts located points). Throws NoDataInDomain when nothing is located.
std::pair<SparseMatrix, Eigen::VectorXd> assemble_A_d(const TriMesh& mesh, const DataSet& data);

/// All matrices of the smoothing problem on one mesh.
struct FemSystem {
    std::shared_ptr<const TriMesh> mesh;
    SparseMatrix A;
    SparseMatrix L;
    SparseMatrix G1;
    SparseMatrix G2;
    Eigen::VectorXd d;
    DataProjection projection;
    Eigen::VectorXd y;                     ///< values of the used points

    std::size_t num_nodes() const { return mesh->num_nodes(); }
    std::size_t num_data() const { return projection.used.size(); }
    /// d for an arbitrary response vector over the used points.
    Eigen::VectorXd project_values(const Eigen::VectorXd& values) const;
};

FemSystem assemble_system(std::shared_ptr<const TriMesh> mesh, const DataSet& data);

} // namespace tpsfem
