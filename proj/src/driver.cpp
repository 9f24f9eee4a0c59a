#include "tpsfem/driver.hpp"

#include "tpsfem/error.hpp"

#include <algorithm>
#include <cmath>

namespace tpsfem {

namespace {

std::vector<std::size_t> histogram(const IndicatorField& field)
{
    std::vector<std::size_t> bins(10, 0);
    const double m = field.max();
    for (const auto& [key, v] : field.values) {
        const double r = m > 0.0 ? v / m : 0.0;
        bins[std::min<std::size_t>(9, static_cast<std::size_t>(r * 10.0))]++;
    }
    return bins;
}

class Runner {
public:
    Runner(const DataSet& data, const RunConfig& cfg, const std::function<void(const IterationRecord&)>& observer)
        : data_(data), cfg_(cfg), observer_(observer)
    {
    }

    RunResult run();

private:
    void fit(IterationRecord& rec);
    void extend_values(std::size_t first_new);
    void adaptive_step(IterationRecord& rec);
    std::shared_ptr<const Smoother> interpolated_smoother() const;
    void emit(IterationRecord rec);

    const DataSet& data_;
    const RunConfig& cfg_;
    const std::function<void(const IterationRecord&)>& observer_;

    TriMesh mesh_;
    BoundaryStrategy strategy_;
    NodalValues values_;         ///< latest nodal values, extended after refinement
    NodalValues unit_boundary_;  ///< boundary entries with multiplier values at alpha = 1
    double alpha_ = 1.0;
    std::shared_ptr<const Smoother> smoother_;
    RunResult result_;
};

void Runner::emit(IterationRecord rec)
{
    result_.records.push_back(rec);
    if (observer_) observer_(result_.records.back());
}

void Runner::fit(IterationRecord& rec)
{
    auto mesh = std::make_shared<const TriMesh>(mesh_);
    const FemSystem fem = assemble_system(mesh, data_);
    const BoundaryValues unit_bv = BoundaryValues::from_nodal(*mesh, unit_boundary_);
    if (cfg_.fixed_alpha) {
        alpha_ = *cfg_.fixed_alpha;
        rec.gcv_score = 0.0;
    } else {
        GcvConfig gcv = cfg_.gcv;
        gcv.seed = cfg_.seed + static_cast<std::uint64_t>(rec.iteration);
        const GcvResult sel = select_alpha(fem, unit_bv, gcv);
        alpha_ = sel.alpha;
        rec.gcv_score = sel.score;
    }
    SaddleSystem sys(fem, alpha_, unit_bv.scaled_multiplier(alpha_));
    values_ = sys.solve();
    smoother_ = std::make_shared<const Smoother>(mesh, values_, alpha_);

    rec.nodes = mesh->num_nodes();
    rec.triangles = mesh->num_triangles();
    rec.alpha = alpha_;
    rec.rmse = rmse(*smoother_, data_);
    rec.max_residual = max_abs_residual(*smoother_, data_);
    rec.solve_time_s = sys.last_stats().seconds;
    rec.solver = sys.last_stats().method;
    rec.relative_residual = sys.last_stats().relative_residual;
    rec.dropped_points = fem.projection.dropped;
    try {
        rec.near_boundary_ratio = near_boundary_ratio(*mesh, cfg_.near_boundary_radius);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroInterior) throw;
        rec.near_boundary_ratio.reset();
    }
}

void Runner::extend_values(std::size_t first_new)
{
    const std::size_t n = mesh_.num_nodes();
    values_.resize(n);
    unit_boundary_.resize(n);
    for (std::size_t i = first_new; i < n; ++i) {
        const auto id = static_cast<NodeId>(i);
        const auto parents = mesh_.node_parents(id);
        if (!parents) {
            throw Error(ErrorCode::NoNeighbors, "refined node " + std::to_string(i) + " has no parent edge");
        }
        const auto [a, b] = *parents;
        if (mesh_.is_boundary(id)) {
            const NodeValue u = new_boundary_node_values(strategy_, mesh_, id, unit_boundary_, a, b, 1.0);
            unit_boundary_.c[id] = u.c;
            unit_boundary_.g1[id] = u.g1;
            unit_boundary_.g2[id] = u.g2;
            unit_boundary_.w[id] = u.w;
            values_.c[id] = u.c;
            values_.g1[id] = u.g1;
            values_.g2[id] = u.g2;
            values_.w[id] = alpha_ * u.w;
        } else {
            values_.c[id] = 0.5 * (values_.c[a] + values_.c[b]);
            values_.g1[id] = 0.5 * (values_.g1[a] + values_.g1[b]);
            values_.g2[id] = 0.5 * (values_.g2[a] + values_.g2[b]);
            values_.w[id] = 0.5 * (values_.w[a] + values_.w[b]);
        }
    }
}

std::shared_ptr<const Smoother> Runner::interpolated_smoother() const
{
    return std::make_shared<const Smoother>(std::make_shared<const TriMesh>(mesh_), values_, alpha_);
}

void Runner::adaptive_step(IterationRecord& rec)
{
    const std::size_t start_nodes = mesh_.num_nodes();
    const std::size_t target = 2 * start_nodes;
    IndicatorField field = compute_indicators(cfg_.indicator, *smoother_, data_, alpha_);
    rec.indicator_histogram = histogram(field);
    while (mesh_.num_nodes() < target) {
        const std::size_t before = mesh_.num_nodes();
        const std::vector<EdgeKey> marked = mark(field, cfg_.marking_gamma);
        rec.marked_edges += marked.size();
        rec.refined_edges += refine_wave(mesh_, marked, target);
        ++rec.waves;
        if (mesh_.num_nodes() == before) {
            throw Error(ErrorCode::NonConvergence,
                        "refinement wave " + std::to_string(rec.waves) + " added no node (" +
                            std::to_string(marked.size()) + " edges marked)");
        }
        extend_values(before);
        if (mesh_.num_nodes() >= target) break;

        // stale values for surviving edges, fresh values for new ones
        const auto snapshot = interpolated_smoother();
        std::set<EdgeKey> fresh;
        std::map<EdgeKey, double> kept;
        for (const Triangle& t : mesh_.triangles()) {
            const auto [a, b] = t.base();
            const EdgeKey key(a, b);
            auto it = field.values.find(key);
            if (it != field.values.end()) {
                kept.emplace(key, it->second);
            } else {
                fresh.insert(key);
            }
        }
        IndicatorField next = compute_indicators(cfg_.indicator, *snapshot, data_, alpha_, &fresh);
        next.values.insert(kept.begin(), kept.end());
        field = std::move(next);
    }
}

RunResult Runner::run()
{
    cfg_.validate();
    mesh_ = initial_mesh(data_, cfg_);
    strategy_.kind = cfg_.boundary;
    strategy_.constant_value = cfg_.constant_value;
    if (cfg_.boundary != BoundaryKind::constant) {
        SamplePlan plan = cfg_.tps_sample;
        plan.count = std::min(plan.count, data_.size());
        const DataSet sample_set = sample(data_, plan, cfg_.seed);
        GcvConfig gcv = cfg_.gcv;
        auto tps = fit_tps_gcv(sample_set, gcv);
        result_.boundary_tps = tps.model;
        strategy_.tps = std::make_shared<const TpsModel>(std::move(tps.model));
    }
    values_ = NodalValues::zeros(mesh_.num_nodes());
    unit_boundary_ = NodalValues::zeros(mesh_.num_nodes());
    const BoundaryValues init = initial_boundary_values(mesh_, strategy_, 1.0);
    for (std::size_t k = 0; k < init.nodes.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        unit_boundary_.c[init.nodes[k]] = init.c[kk];
        unit_boundary_.g1[init.nodes[k]] = init.g1[kk];
        unit_boundary_.g2[init.nodes[k]] = init.g2[kk];
        unit_boundary_.w[init.nodes[k]] = init.w[kk];
    }

    const int max_iters = cfg_.resolved_max_iters();
    int stagnant = 0;
    result_.stop_reason = "max_iters";
    for (int k = 0; k <= max_iters; ++k) {
        IterationRecord rec;
        rec.iteration = k;
        try {
            if (k > 0) {
                if (cfg_.refine == RefineMode::uniform) {
                    const std::size_t before = mesh_.num_nodes();
                    bisect_all(mesh_);
                    rec.refined_edges = mesh_.num_nodes() - before;
                    rec.waves = 1;
                    extend_values(before);
                } else {
                    adaptive_step(rec);
                }
            }
            fit(rec);
        } catch (const Error& e) {
            throw Error(e.code(), "iteration " + std::to_string(k) + ": " + e.message());
        }
        const double previous = result_.records.empty() ? 0.0 : result_.records.back().rmse;
        emit(rec);
        if (cfg_.rmse_tolerance && rec.rmse <= *cfg_.rmse_tolerance) {
            result_.stop_reason = "tolerance";
            break;
        }
        if (k > 0 && cfg_.stop_on_stagnation) {
            const bool improved = rec.rmse < (1.0 - cfg_.stagnation_fraction) * previous;
            stagnant = improved ? 0 : stagnant + 1;
            if (stagnant >= cfg_.stagnation_count) {
                result_.stop_reason = "stagnation";
                break;
            }
        }
    }
    result_.smoother = smoother_;
    return result_;
}

} // namespace

std::string to_string(RefineMode m)
{
    return m == RefineMode::uniform ? "uniform" : "adaptive";
}

RefineMode parse_refine_mode(const std::string& s)
{
    if (s == "uniform") return RefineMode::uniform;
    if (s == "adaptive") return RefineMode::adaptive;
    throw Error(ErrorCode::InvalidArgument, "unknown refinement mode '" + s + "'");
}

std::string to_string(DomainKind k)
{
    return k == DomainKind::square ? "square" : "irregular";
}

int RunConfig::resolved_max_iters() const
{
    if (max_iters > 0) return max_iters;
    const bool square = domain == DomainKind::square && !polygon;
    if (refine == RefineMode::uniform) return square ? 10 : 8;
    return square ? 8 : 7;
}

void RunConfig::validate() const
{
    if (max_iters < 0) {
        throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    }
    if (initial_level < 0 || trim_level < 0) {
        throw Error(ErrorCode::InvalidArgument, "mesh levels must be non-negative");
    }
    if (fixed_alpha && !(*fixed_alpha > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    }
    if (!(marking_gamma >= 0.0 && marking_gamma <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "marking gamma must lie in [0, 1]");
    }
    gcv.validate();
}

TriMesh initial_mesh(const DataSet& data, const RunConfig& cfg)
{
    if (cfg.polygon) {
        return mesh_polygon(*cfg.polygon, cfg.trim_level);
    }
    if (cfg.domain == DomainKind::irregular) {
        return trim_to_irregular(build_square_mesh(cfg.trim_level), data);
    }
    return build_square_mesh(cfg.initial_level);
}

std::size_t refine_wave(TriMesh& mesh, const std::vector<EdgeKey>& marked, std::size_t node_limit)
{
    std::size_t count = 0;
    for (const EdgeKey& e : marked) {
        if (mesh.num_nodes() >= node_limit) break;
        if (!mesh.has_edge(e) || !mesh.is_refinable_edge(e)) continue;
        mesh.bisect_edge(e);
        ++count;
    }
    return count;
}

RunResult run(const DataSet& data, const RunConfig& cfg, const std::function<void(const IterationRecord&)>& observer)
{
    return Runner(data, cfg, observer).run();
}

} // namespace tpsfem
