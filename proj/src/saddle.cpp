#include "tpsfem/saddle.hpp"

#include "tpsfem/error.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <cmath>

namespace tpsfem {

namespace {

constexpr double kTargetResidual = 1e-9;
constexpr int kRefinementSteps = 3;

Eigen::VectorXd gather(const std::vector<NodeId>& ids, const Eigen::VectorXd& full)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = full[ids[k]];
    }
    return out;
}

} // namespace

NodalValues NodalValues::zeros(std::size_t n)
{
    const auto m = static_cast<Eigen::Index>(n);
    return {Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
}

void NodalValues::resize(std::size_t n)
{
    for (Eigen::VectorXd* v : {&c, &g1, &g2, &w}) {
        const Eigen::Index old = v->size();
        v->conservativeResize(static_cast<Eigen::Index>(n));
        if (static_cast<Eigen::Index>(n) > old) {
            v->tail(static_cast<Eigen::Index>(n) - old).setZero();
        }
    }
}

BoundaryValues BoundaryValues::zeros(const TriMesh& mesh)
{
    BoundaryValues bv;
    for (NodeId i = 0; i < static_cast<NodeId>(mesh.num_nodes()); ++i) {
        if (mesh.is_boundary(i)) bv.nodes.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(bv.nodes.size());
    bv.c = bv.g1 = bv.g2 = bv.w = Eigen::VectorXd::Zero(m);
    return bv;
}

BoundaryValues BoundaryValues::from_nodal(const TriMesh& mesh, const NodalValues& values)
{
    BoundaryValues bv = zeros(mesh);
    bv.c = gather(bv.nodes, values.c);
    bv.g1 = gather(bv.nodes, values.g1);
    bv.g2 = gather(bv.nodes, values.g2);
    bv.w = gather(bv.nodes, values.w);
    return bv;
}

BoundaryValues BoundaryValues::scaled_multiplier(double factor) const
{
    BoundaryValues out = *this;
    out.w *= factor;
    return out;
}

void BoundaryValues::check_against(const TriMesh& mesh) const
{
    std::size_t k = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(mesh.num_nodes()); ++i) {
        if (!mesh.is_boundary(i)) continue;
        if (k >= nodes.size() || nodes[k] != i) {
            throw Error(ErrorCode::DimensionMismatch, "boundary values do not match the mesh boundary");
        }
        ++k;
    }
    const auto m = static_cast<Eigen::Index>(nodes.size());
    if (k != nodes.size() || c.size() != m || g1.size() != m || g2.size() != m || w.size() != m) {
        throw Error(ErrorCode::DimensionMismatch, "boundary values do not match the mesh boundary");
    }
}

SaddleSystem::SaddleSystem(const FemSystem& fem, double alpha, const BoundaryValues& bv)
    : mesh_(fem.mesh), alpha_(alpha), bv_(bv)
{
    if (!(alpha > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    }
    const auto n = static_cast<Eigen::Index>(fem.num_nodes());
    for (const SparseMatrix* M : {&fem.A, &fem.L, &fem.G1, &fem.G2}) {
        if (M->rows() != n || M->cols() != n) {
            throw Error(ErrorCode::DimensionMismatch, "FEM matrices do not match the mesh");
        }
    }
    if (fem.d.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "data vector does not match the mesh");
    }
    bv_.check_against(*mesh_);

    index_.assign(static_cast<std::size_t>(n), -1);
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
        if (!mesh_->is_boundary(i)) {
            index_[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(interior_.size());
            interior_.push_back(i);
        }
    }
    const auto ni = static_cast<Eigen::Index>(interior_.size());
    if (ni == 0) {
        throw Error(ErrorCode::SingularSystem, "mesh has no interior nodes to solve for");
    }

    std::array<Eigen::VectorXd, 4> full_bv;
    for (auto& v : full_bv) v = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < bv_.nodes.size(); ++k) {
        const NodeId id = bv_.nodes[k];
        const auto kk = static_cast<Eigen::Index>(k);
        full_bv[0][id] = bv_.c[kk];
        full_bv[1][id] = bv_.g1[kk];
        full_bv[2][id] = bv_.g2[kk];
        full_bv[3][id] = bv_.w[kk];
    }
    for (auto& h : h_) h = Eigen::VectorXd::Zero(ni);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(fem.L.nonZeros()) * 9);
    auto add_block = [&](const SparseMatrix& M, int rb, int cb, double scale, bool transposed) {
        for (Eigen::Index col = 0; col < M.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(M, col); it; ++it) {
                Eigen::Index r = it.row();
                Eigen::Index c = it.col();
                if (transposed) std::swap(r, c);
                const Eigen::Index ir = index_[static_cast<std::size_t>(r)];
                if (ir < 0) continue;
                const Eigen::Index ic = index_[static_cast<std::size_t>(c)];
                const double v = scale * it.value();
                if (ic >= 0) {
                    trip.emplace_back(4 * ir + rb, 4 * ic + cb, v);
                } else {
                    h_[static_cast<std::size_t>(rb)][ir] += v * full_bv[static_cast<std::size_t>(cb)][c];
                }
            }
        }
    };
    add_block(fem.A, 0, 0, 1.0, false);
    add_block(fem.L, 0, 3, 1.0, false);
    add_block(fem.L, 1, 1, alpha, false);
    add_block(fem.G1, 1, 3, -1.0, false);
    add_block(fem.L, 2, 2, alpha, false);
    add_block(fem.G2, 2, 3, -1.0, false);
    add_block(fem.L, 3, 0, 1.0, false);
    add_block(fem.G1, 3, 1, -1.0, true);
    add_block(fem.G2, 3, 2, -1.0, true);

    matrix_.resize(4 * ni, 4 * ni);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    rhs_ = rhs_for(fem.d, false);
}

Eigen::VectorXd SaddleSystem::rhs_for(const Eigen::VectorXd& d, bool homogeneous) const
{
    const auto ni = static_cast<Eigen::Index>(interior_.size());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * ni);
    for (Eigen::Index k = 0; k < ni; ++k) {
        rhs[4 * k] = d[interior_[static_cast<std::size_t>(k)]];
        if (!homogeneous) {
            for (int b = 0; b < 4; ++b) {
                rhs[4 * k + b] -= h_[static_cast<std::size_t>(b)][k];
            }
        }
    }
    return rhs;
}

void SaddleSystem::factorize()
{
    lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
    lu_->analyzePattern(matrix_);
    lu_->factorize(matrix_);
    lu_ok_ = lu_->info() == Eigen::Success;
    factorized_ = true;
}

Eigen::VectorXd SaddleSystem::solve_reduced(const Eigen::VectorXd& rhs)
{
    const auto start = std::chrono::steady_clock::now();
    if (!factorized_) {
        factorize();
    }
    const double bnorm = std::max(rhs.norm(), 1e-300);
    Eigen::VectorXd x;
    double rel = std::numeric_limits<double>::infinity();
    stats_ = SolveStats{};
    if (lu_ok_) {
        stats_.method = "sparse-lu";
        x = lu_->solve(rhs);
        Eigen::VectorXd r = rhs - matrix_ * x;
        rel = r.norm() / bnorm;
        for (int k = 0; k < kRefinementSteps && rel > 1e-13 && std::isfinite(rel); ++k) {
            x += lu_->solve(r);
            r = rhs - matrix_ * x;
            rel = r.norm() / bnorm;
        }
        if (rhs.norm() == 0.0) rel = 0.0;
    }
    if (!lu_ok_ || !(rel <= kTargetResidual)) {
        // Krylov fallback on the symmetric indefinite operator
        Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> minres;
        minres.setMaxIterations(static_cast<Eigen::Index>(20 * mesh_->num_nodes()));
        minres.setTolerance(kTargetResidual);
        minres.compute(matrix_);
        Eigen::VectorXd y;
        if (lu_ok_ && x.allFinite()) {
            y = minres.solveWithGuess(rhs, x);
        } else {
            y = minres.solve(rhs);
        }
        const double rel_m = (rhs - matrix_ * y).norm() / bnorm;
        stats_.method = "minres";
        stats_.iterations = static_cast<int>(minres.iterations());
        if (!(rel_m <= kTargetResidual)) {
            if (!lu_ok_) {
                throw Error(ErrorCode::SingularSystem,
                            "sparse factorization failed and MINRES stalled at relative residual " +
                                std::to_string(rel_m) + " after " + std::to_string(minres.iterations()) +
                                " iterations");
            }
            throw Error(ErrorCode::NonConvergence,
                        "relative residual " + std::to_string(std::min(rel, rel_m)) + " after " +
                            std::to_string(minres.iterations()) + " MINRES iterations");
        }
        x = std::move(y);
        rel = rel_m;
    }
    stats_.relative_residual = rel;
    stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return x;
}

NodalValues SaddleSystem::expand(const Eigen::VectorXd& x, bool homogeneous) const
{
    NodalValues out = NodalValues::zeros(mesh_->num_nodes());
    std::array<Eigen::VectorXd*, 4> dst{&out.c, &out.g1, &out.g2, &out.w};
    for (std::size_t k = 0; k < interior_.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        for (std::size_t b = 0; b < 4; ++b) {
            (*dst[b])[interior_[k]] = x[4 * kk + static_cast<Eigen::Index>(b)];
        }
    }
    if (!homogeneous) {
        for (std::size_t k = 0; k < bv_.nodes.size(); ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            out.c[bv_.nodes[k]] = bv_.c[kk];
            out.g1[bv_.nodes[k]] = bv_.g1[kk];
            out.g2[bv_.nodes[k]] = bv_.g2[kk];
            out.w[bv_.nodes[k]] = bv_.w[kk];
        }
    }
    return out;
}

NodalValues SaddleSystem::solve()
{
    return expand(solve_reduced(rhs_), false);
}

NodalValues SaddleSystem::solve_for(const Eigen::VectorXd& d, bool homogeneous)
{
    return expand(solve_reduced(rhs_for(d, homogeneous)), homogeneous);
}

SaddleSystem build_system(const FemSystem& fem, double alpha, const BoundaryValues& bv)
{
    return SaddleSystem(fem, alpha, bv);
}

Smoother solve(SaddleSystem& system, const FemSystem& fem)
{
    return Smoother(fem.mesh, system.solve(), system.alpha());
}

double constraint_residual(const FemSystem& fem, const NodalValues& v)
{
    const Eigen::VectorXd r = fem.L * v.c - fem.G1.transpose() * v.g1 - fem.G2.transpose() * v.g2;
    double worst = 0.0;
    for (NodeId i = 0; i < static_cast<NodeId>(fem.num_nodes()); ++i) {
        if (!fem.mesh->is_boundary(i)) worst = std::max(worst, std::abs(r[i]));
    }
    return worst;
}

Smoother::Smoother(std::shared_ptr<const TriMesh> mesh, NodalValues values, double alpha)
    : mesh_(std::move(mesh)), values_(std::move(values)), alpha_(alpha),
      locator_(std::make_shared<PointLocator>(*mesh_))
{
    if (values_.size() != mesh_->num_nodes()) {
        throw Error(ErrorCode::DimensionMismatch, "nodal values do not match the mesh");
    }
}

double Smoother::evaluate(Point2 p) const
{
    auto t = locator_->locate(p);
    if (!t) {
        throw Error(ErrorCode::OutsideDomain, "point outside the mesh");
    }
    const auto c = mesh_->corners(*t);
    const auto l = barycentric(c[0], c[1], c[2], p);
    const auto& v = mesh_->triangle(*t).v;
    return l[0] * values_.c[v[0]] + l[1] * values_.c[v[1]] + l[2] * values_.c[v[2]];
}

std::array<double, 2> Smoother::evaluate_grad(Point2 p) const
{
    auto t = locator_->locate(p);
    if (!t) {
        throw Error(ErrorCode::OutsideDomain, "point outside the mesh");
    }
    const auto c = mesh_->corners(*t);
    const auto l = barycentric(c[0], c[1], c[2], p);
    const auto& v = mesh_->triangle(*t).v;
    return {l[0] * values_.g1[v[0]] + l[1] * values_.g1[v[1]] + l[2] * values_.g1[v[2]],
            l[0] * values_.g2[v[0]] + l[1] * values_.g2[v[1]] + l[2] * values_.g2[v[2]]};
}

NodeValue Smoother::evaluate_all(Point2 p) const
{
    auto t = locator_->locate(p);
    if (!t) {
        throw Error(ErrorCode::OutsideDomain, "point outside the mesh");
    }
    const auto c = mesh_->corners(*t);
    const auto l = barycentric(c[0], c[1], c[2], p);
    const auto& v = mesh_->triangle(*t).v;
    NodeValue out;
    for (std::size_t k = 0; k < 3; ++k) {
        out.c += l[k] * values_.c[v[k]];
        out.g1 += l[k] * values_.g1[v[k]];
        out.g2 += l[k] * values_.g2[v[k]];
        out.w += l[k] * values_.w[v[k]];
    }
    return out;
}

std::array<double, 2> Smoother::gradient_in(TriId t) const
{
    const auto g = basis_gradients(*mesh_, t);
    const auto& v = mesh_->triangle(t).v;
    std::array<double, 2> out{};
    for (std::size_t k = 0; k < 3; ++k) {
        out[0] += g[0][k] * values_.c[v[k]];
        out[1] += g[1][k] * values_.c[v[k]];
    }
    return out;
}

namespace {

template <typename F>
void for_each_residual(const Smoother& s, const DataSet& data, F&& f)
{
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto t = s.locator().locate(data.points[i]);
        if (!t) continue;
        const auto c = s.mesh().corners(*t);
        const auto l = barycentric(c[0], c[1], c[2], data.points[i]);
        const auto& v = s.mesh().triangle(*t).v;
        const double fit = l[0] * s.values().c[v[0]] + l[1] * s.values().c[v[1]] + l[2] * s.values().c[v[2]];
        f(fit - data.values[i]);
    }
}

} // namespace

double rmse(const Smoother& s, const DataSet& data)
{
    double sum = 0.0;
    std::size_t n = 0;
    for_each_residual(s, data, [&](double r) {
        sum += r * r;
        ++n;
    });
    return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

double max_abs_residual(const Smoother& s, const DataSet& data)
{
    double worst = 0.0;
    for_each_residual(s, data, [&](double r) { worst = std::max(worst, std::abs(r)); });
    return worst;
}

Eigen::VectorXd fitted_values(const FemSystem& fem, const Eigen::VectorXd& c)
{
    return fem.projection.basis * c;
}

} // namespace tpsfem
