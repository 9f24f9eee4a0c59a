#pragma once

#include "tpsfem/assembly.hpp"
#include "tpsfem/locate.hpp"

#include <Eigen/SparseLU>

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace tpsfem {

/// Coefficients of the smoother s = b^T c, its gradient surrogates u_j = b^T g_j and
/// the Lagrange multiplier w, one entry per mesh node.
struct NodalValues {
    Eigen::VectorXd c;
    Eigen::VectorXd g1;
    Eigen::VectorXd g2;
    Eigen::VectorXd w;

    static NodalValues zeros(std::size_t n);
    std::size_t size() const { return static_cast<std::size_t>(c.size()); }
    void resize(std::size_t n); ///< keeps existing entries, new entries zero
};

/// The four coefficients of one node.
struct NodeValue {
    double c = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double w = 0.0;
};

/// Dirichlet values on the boundary nodes of a mesh.
struct BoundaryValues {
    std::vector<NodeId> nodes; ///< increasing boundary node ids
    Eigen::VectorXd c;
    Eigen::VectorXd g1;
    Eigen::VectorXd g2;
    Eigen::VectorXd w;

    static BoundaryValues zeros(const TriMesh& mesh);
    /// Boundary entries of a full nodal vector set.
    static BoundaryValues from_nodal(const TriMesh& mesh, const NodalValues& values);
    /// Copy with the multiplier values multiplied by `factor`.
    BoundaryValues scaled_multiplier(double factor) const;
    /// Throws DimensionMismatch unless `nodes` is exactly the boundary node set.
    void check_against(const TriMesh& mesh) const;
};

struct SolveStats {
    std::string method;         ///< "sparse-lu" or "minres"
    double relative_residual = 0.0;
    int iterations = 0;
    double seconds = 0.0;
};

/// Reduced saddle-point system with boundary rows and columns eliminated.
///
/// Unknowns are interleaved per interior node as [c g1 g2 w]. Block rows:
///   A c + L w = d,   alpha L g_j - G_j w = 0,   L c - G1^T g1 - G2^T g2 = 0,
/// where (G_j)_pq = integral of b_p d_j b_q; the last row is the weak statement
/// of u = grad s. Boundary contributions form h1..h4 on the right-hand side.
class SaddleSystem {
public:
    SaddleSystem(const FemSystem& fem, double alpha, const BoundaryValues& bv);

    const SparseMatrix& matrix() const { return matrix_; }
    const Eigen::VectorXd& rhs() const { return rhs_; }
    /// h1..h4 restricted to interior nodes.
    const std::array<Eigen::VectorXd, 4>& h() const { return h_; }
    const std::vector<NodeId>& interior() const { return interior_; }
    double alpha() const { return alpha_; }
    std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }

    /// Solves with the assembled right-hand side.
    NodalValues solve();
    /// Solves for another data vector d (full length). With `homogeneous` the
    /// boundary values are taken as zero.
    NodalValues solve_for(const Eigen::VectorXd& d, bool homogeneous);

    const SolveStats& last_stats() const { return stats_; }

private:
    Eigen::VectorXd rhs_for(const Eigen::VectorXd& d, bool homogeneous) const;
    Eigen::VectorXd solve_reduced(const Eigen::VectorXd& rhs);
    NodalValues expand(const Eigen::VectorXd& x, bool homogeneous) const;
    void factorize();

    std::shared_ptr<const TriMesh> mesh_;
    double alpha_;
    BoundaryValues bv_;
    std::vector<NodeId> interior_;
    std::vector<Eigen::Index> index_; ///< interior position per node or -1
    SparseMatrix matrix_;
    Eigen::VectorXd rhs_;
    std::array<Eigen::VectorXd, 4> h_;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
    bool factorized_ = false;
    bool lu_ok_ = false;
    SolveStats stats_;
};

/// Fitted smoother over a mesh. Immutable after construction.
class Smoother {
public:
    Smoother(std::shared_ptr<const TriMesh> mesh, NodalValues values, double alpha);

    const TriMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
    const NodalValues& values() const { return values_; }
    double alpha() const { return alpha_; }
    const PointLocator& locator() const { return *locator_; }

    /// Throws OutsideDomain for points outside the mesh.
    double evaluate(Point2 p) const;
    /// Interpolated gradient surrogate (u1, u2).
    std::array<double, 2> evaluate_grad(Point2 p) const;
    /// Linear interpolation of all four nodal fields.
    NodeValue evaluate_all(Point2 p) const;
    /// Piecewise-constant gradient of s on triangle t.
    std::array<double, 2> gradient_in(TriId t) const;

private:
    std::shared_ptr<const TriMesh> mesh_;
    NodalValues values_;
    double alpha_;
    std::shared_ptr<const PointLocator> locator_;
};

SaddleSystem build_system(const FemSystem& fem, double alpha, const BoundaryValues& bv);
Smoother solve(SaddleSystem& system, const FemSystem& fem);

/// Max-norm of L c - G1^T g1 - G2^T g2 over interior rows.
double constraint_residual(const FemSystem& fem, const NodalValues& v);

/// RMSE and maximum absolute residual over the data points located in the mesh.
double rmse(const Smoother& s, const DataSet& data);
double max_abs_residual(const Smoother& s, const DataSet& data);

/// Fitted values B c at the used data points of a FemSystem.
Eigen::VectorXd fitted_values(const FemSystem& fem, const Eigen::VectorXd& c);

} // namespace tpsfem
