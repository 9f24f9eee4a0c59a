#include "tpsfem/indicators.hpp"

#include "tpsfem/domain.hpp"
#include "tpsfem/error.hpp"

#include <algorithm>
#include <cmath>

namespace tpsfem {

namespace {

// integral over a triangle of the square of a linear function with nodal values f
double linear_square_integral(double area, const std::array<double, 3>& f)
{
    const double sum = f[0] + f[1] + f[2];
    return area / 12.0 * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + sum * sum);
}

} // namespace

std::string to_string(IndicatorKind k)
{
    return k == IndicatorKind::auxiliary ? "auxiliary" : "recovery";
}

IndicatorKind parse_indicator_kind(const std::string& s)
{
    if (s == "auxiliary") return IndicatorKind::auxiliary;
    if (s == "recovery") return IndicatorKind::recovery;
    throw Error(ErrorCode::InvalidArgument, "unknown indicator '" + s + "'");
}

double IndicatorField::max() const
{
    double m = 0.0;
    for (const auto& [key, v] : values) m = std::max(m, v);
    return m;
}

std::array<Eigen::VectorXd, 2> recovered_gradient(const Smoother& s)
{
    const TriMesh& mesh = s.mesh();
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    std::array<Eigen::VectorXd, 2> g{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const double w = mesh.area(t) / 3.0;
        const auto grad = s.gradient_in(t);
        for (NodeId v : mesh.triangle(t).v) {
            mass[v] += w;
            g[0][v] += w * grad[0];
            g[1][v] += w * grad[1];
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (mass[i] > 0.0) {
            g[0][i] /= mass[i];
            g[1][i] /= mass[i];
        }
    }
    return g;
}

std::vector<double> recovery_indicators(const Smoother& s)
{
    const TriMesh& mesh = s.mesh();
    const auto rec = recovered_gradient(s);
    std::vector<double> eta(mesh.num_triangles());
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto grad = s.gradient_in(t);
        const auto& v = mesh.triangle(t).v;
        double sq = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const std::array<double, 3> f{rec[j][v[0]] - grad[j], rec[j][v[1]] - grad[j], rec[j][v[2]] - grad[j]};
            sq += linear_square_integral(mesh.area(t), f);
        }
        eta[static_cast<std::size_t>(t)] = std::sqrt(std::max(sq, 0.0));
    }
    return eta;
}

double recovery_indicator(const Smoother& s, TriId t)
{
    return recovery_indicators(s).at(static_cast<std::size_t>(t));
}

std::map<EdgeKey, double> triangles_to_base_edges(const TriMesh& mesh, const std::vector<double>& tri_values)
{
    std::map<EdgeKey, double> out;
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto [a, b] = mesh.triangle(t).base();
        auto [it, inserted] = out.emplace(EdgeKey(a, b), tri_values[static_cast<std::size_t>(t)]);
        if (!inserted) it->second = std::max(it->second, tri_values[static_cast<std::size_t>(t)]);
    }
    return out;
}

AuxiliaryIndicator::AuxiliaryIndicator(const Smoother& s, const DataSet& data, double alpha)
    : s_(&s), data_(&data), alpha_(alpha), tri_data_(s.mesh().num_triangles())
{
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (auto t = s.locator().locate(data.points[i])) {
            tri_data_[static_cast<std::size_t>(*t)].push_back(i);
        }
    }
}

double AuxiliaryIndicator::operator()(EdgeKey e) const
{
    const TriMesh& mesh = s_->mesh();
    const auto inc = mesh.edge_triangles(e);
    if (!inc) {
        throw Error(ErrorCode::InvalidArgument, "edge is not part of the mesh");
    }
    std::vector<TriId> core;
    for (TriId t : *inc) {
        if (t != kNoTriangle) core.push_back(t);
    }
    std::vector<TriId> patch = core;
    for (TriId t : core) {
        const auto& v = mesh.triangle(t).v;
        for (std::size_t k = 0; k < 3; ++k) {
            const TriId nb = mesh.neighbor_across(t, EdgeKey(v[k], v[(k + 1) % 3]));
            if (nb != kNoTriangle && std::find(patch.begin(), patch.end(), nb) == patch.end()) {
                patch.push_back(nb);
            }
        }
    }

    DataSet local;
    for (TriId t : patch) {
        for (std::size_t i : tri_data_[static_cast<std::size_t>(t)]) {
            local.points.push_back(data_->points[i]);
            local.values.push_back(data_->values[i]);
        }
    }
    if (local.points.empty()) {
        return 0.0;
    }

    auto local_mesh = std::make_shared<TriMesh>(submesh(mesh, patch));
    uniform_refine(*local_mesh);
    if (local_mesh->num_boundary_nodes() == local_mesh->num_nodes()) {
        return 0.0;
    }

    const FemSystem fem = assemble_system(local_mesh, local);
    BoundaryValues bv = BoundaryValues::zeros(*local_mesh);
    for (std::size_t k = 0; k < bv.nodes.size(); ++k) {
        const NodeValue v = s_->evaluate_all(local_mesh->node(bv.nodes[k]));
        const auto kk = static_cast<Eigen::Index>(k);
        bv.c[kk] = v.c;
        bv.g1[kk] = v.g1;
        bv.g2[kk] = v.g2;
        bv.w[kk] = v.w;
    }
    SaddleSystem sys(fem, alpha_, bv);
    const Smoother local_s(local_mesh, sys.solve(), alpha_);

    double sq = 0.0;
    for (TriId t = 0; t < static_cast<TriId>(local_mesh->num_triangles()); ++t) {
        const Point2 centre = local_mesh->centroid(t);
        for (TriId parent : core) {
            if (!triangle_contains(mesh, parent, centre, 1e-9)) continue;
            const auto gs = s_->gradient_in(parent);
            const auto gl = local_s.gradient_in(t);
            const double d1 = gs[0] - gl[0];
            const double d2 = gs[1] - gl[1];
            sq += local_mesh->area(t) * (d1 * d1 + d2 * d2);
            break;
        }
    }
    return std::sqrt(sq);
}

double auxiliary_indicator(const Smoother& s, const DataSet& data, EdgeKey e, double alpha)
{
    return AuxiliaryIndicator(s, data, alpha)(e);
}

IndicatorField compute_indicators(IndicatorKind kind, const Smoother& s, const DataSet& data, double alpha,
                                  const std::set<EdgeKey>* only)
{
    IndicatorField field;
    field.kind = kind;
    const TriMesh& mesh = s.mesh();
    if (kind == IndicatorKind::recovery) {
        auto all = triangles_to_base_edges(mesh, recovery_indicators(s));
        for (auto& [key, v] : all) {
            if (!only || only->count(key)) field.values.emplace(key, v);
        }
        return field;
    }
    const AuxiliaryIndicator aux(s, data, alpha);
    for (TriId t = 0; t < static_cast<TriId>(mesh.num_triangles()); ++t) {
        const auto [a, b] = mesh.triangle(t).base();
        const EdgeKey key(a, b);
        if (only && !only->count(key)) continue;
        if (field.values.count(key)) continue;
        field.values.emplace(key, aux(key));
    }
    return field;
}

std::vector<EdgeKey> mark(const IndicatorField& field, double gamma)
{
    if (field.values.empty()) {
        throw Error(ErrorCode::EmptyField, "no indicator values to mark");
    }
    const double threshold = gamma * field.max();
    std::vector<std::pair<double, EdgeKey>> hits;
    for (const auto& [key, v] : field.values) {
        if (v >= threshold) hits.emplace_back(v, key);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<EdgeKey> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.push_back(h.second);
    return out;
}

} // namespace tpsfem
