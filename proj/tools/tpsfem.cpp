// Command line front end: fit, baseline, peaks, report.

#include "tpsfem/driver.hpp"
#include "tpsfem/error.hpp"
#include "tpsfem/peaks.hpp"
#include "tpsfem/rbf.hpp"
#include "tpsfem/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace tpsfem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct DataOptions {
    std::string data_path;
    bool peaks = false;
    std::size_t peaks_n = 10000;
    double peaks_sigma = 0.02;
};

struct FitOptions {
    DataOptions data;
    std::string domain = "square";
    std::string polygon_path;
    std::string refine = "adaptive";
    std::string indicator = "recovery";
    std::string boundary = "average";
    std::string alpha = "auto";
    double constant_value = 0.0;
    int max_iters = 0;
    int trim_level = 1;
    int initial_level = 0;
    std::uint64_t seed = 0;
    std::string out_dir = "tpsfem_out";
    bool no_stagnation = false;
    double tolerance = -1.0;
    int probes = 10;
    std::size_t tps_samples = 300;
    int sample_grid = 0;
    bool deterministic = false;
};

struct BaselineOptions {
    DataOptions data;
    std::string kind = "wendland";
    int cover = 100;
    double rho = 0.0;
    double grid_h = 0.02;
    std::string alpha = "auto";
    std::uint64_t seed = 0;
    std::string out_dir = "tpsfem_baseline";
    bool deterministic = false;
};

struct PeaksOptions {
    std::size_t n = 10000;
    double sigma = 0.02;
    std::uint64_t seed = 0;
    std::string out = "peaks.csv";
    bool experiment = false;
    std::vector<std::size_t> counts{100, 200, 300, 400, 500, 600};
    int seeds = 3;
    std::string table;
};

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string out;
};

DataSet load_data(const DataOptions& o, std::uint64_t seed)
{
    if (o.peaks) {
        PeaksSpec spec;
        spec.n = o.peaks_n;
        spec.sigma = o.peaks_sigma;
        const DataSet raw = peaks_generate(spec, seed);
        return normalize(raw.points, raw.values);
    }
    if (o.data_path.empty()) {
        throw Error(ErrorCode::InvalidArgument, "either --data FILE or --peaks is required");
    }
    return ingest_csv(o.data_path);
}

void add_data_options(CLI::App* app, DataOptions& o)
{
    app->add_option("--data", o.data_path, "CSV file with x1,x2,y columns");
    app->add_flag("--peaks", o.peaks, "use generated peaks data instead of a file");
    app->add_option("--peaks-n", o.peaks_n, "number of generated peaks points");
    app->add_option("--peaks-sigma", o.peaks_sigma, "noise level of generated peaks data");
}

std::optional<double> parse_alpha(const std::string& s)
{
    if (s == "auto") return std::nullopt;
    try {
        std::size_t pos = 0;
        const double a = std::stod(s, &pos);
        if (pos == s.size() && a > 0.0) return a;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "--alpha expects 'auto' or a positive number, got '" + s + "'");
}

void write_nodes(const fs::path& path, const Smoother& s)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "id c g1 g2 w\n" << std::setprecision(17);
    const NodalValues& v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << i << ' ' << v.c[k] << ' ' << v.g1[k] << ' ' << v.g2[k] << ' ' << v.w[k] << '\n';
    }
}

void write_surface(const fs::path& path, const Smoother& s, int n)
{
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "x1,x2,s\n" << std::setprecision(17);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point2 p{n == 1 ? 0.5 : i / double(n - 1), n == 1 ? 0.5 : j / double(n - 1)};
            if (!s.locator().locate(p)) continue;
            out << p.x1 << ',' << p.x2 << ',' << s.evaluate(p) << '\n';
        }
    }
}

int cmd_fit(const FitOptions& o)
{
    RunConfig cfg;
    if (o.domain == "square") {
        cfg.domain = DomainKind::square;
    } else if (o.domain == "irregular") {
        cfg.domain = DomainKind::irregular;
    } else if (o.domain == "polygon") {
        if (o.polygon_path.empty()) throw Error(ErrorCode::InvalidArgument, "--domain polygon needs --polygon FILE");
        cfg.domain = DomainKind::irregular;
        cfg.polygon = read_polygon(o.polygon_path);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown domain '" + o.domain + "'");
    }
    cfg.refine = parse_refine_mode(o.refine);
    cfg.indicator = parse_indicator_kind(o.indicator);
    cfg.boundary = parse_boundary_kind(o.boundary);
    cfg.constant_value = o.constant_value;
    cfg.fixed_alpha = parse_alpha(o.alpha);
    cfg.max_iters = o.max_iters;
    cfg.trim_level = o.trim_level;
    cfg.initial_level = o.initial_level;
    cfg.seed = o.seed;
    cfg.gcv.seed = o.seed;
    cfg.gcv.probes = o.probes;
    cfg.stop_on_stagnation = !o.no_stagnation;
    if (o.tolerance > 0.0) cfg.rmse_tolerance = o.tolerance;
    cfg.tps_sample.count = o.tps_samples;
    cfg.validate();

    const DataSet data = load_data(o.data, o.seed);
    fs::create_directories(o.out_dir);
    const fs::path report_path = fs::path(o.out_dir) / "report.jsonl";
    std::ofstream out(report_path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + report_path.string());

    RunReport report;
    report.command = "fit";
    report.seed = o.seed;
    report.config = config_json(cfg);
    report.config["data"] = o.data.peaks ? "peaks" : o.data.data_path;
    report.environment = environment_stamp(o.deterministic);
    ReportWriter writer(out);
    writer.header(report);

    RunResult result;
    try {
        result = run(data, cfg, [&](const IterationRecord& rec) {
            IterationRecord copy = rec;
            if (o.deterministic) copy.solve_time_s = 0.0;
            writer.iteration(copy);
        });
    } catch (const Error& e) {
        writer.failure({std::string(to_string(e.code())), e.message()});
        std::cerr << "tpsfem fit: " << e.what() << '\n';
        if (e.code() == ErrorCode::IoError || e.code() == ErrorCode::ParseError) return kExitIo;
        return kExitNumerical;
    }

    const IterationRecord& last = result.records.back();
    FinalMetrics fm;
    fm.method = "tpsfem";
    fm.nodes = last.nodes;
    {
        const FemSystem fem = assemble_system(result.smoother->mesh_ptr(), data);
        SaddleSystem sys(fem, last.alpha, BoundaryValues::from_nodal(result.smoother->mesh(), result.smoother->values()));
        fm.nonzeros = sys.nonzeros();
        fm.nonzero_ratio = static_cast<double>(sys.nonzeros()) /
                           (static_cast<double>(sys.dimension()) * static_cast<double>(sys.dimension()));
    }
    fm.alpha = last.alpha;
    fm.solve_time_s = o.deterministic ? 0.0 : last.solve_time_s;
    fm.rmse = last.rmse;
    fm.max = last.max_residual;
    fm.near_boundary_ratio = last.near_boundary_ratio;
    fm.dropped_points = last.dropped_points;
    fm.stop_reason = result.stop_reason;
    writer.final(fm);

    write_mesh(fs::path(o.out_dir) / "mesh.txt", result.smoother->mesh());
    write_nodes(fs::path(o.out_dir) / "nodes.txt", *result.smoother);
    if (o.sample_grid > 0) write_surface(fs::path(o.out_dir) / "surface.csv", *result.smoother, o.sample_grid);

    std::cout << "iterations " << result.records.size() << "  nodes " << fm.nodes << "  rmse " << fm.rmse
              << "  max " << fm.max << "  stop " << fm.stop_reason << '\n';
    return 0;
}

int cmd_baseline(const BaselineOptions& o)
{
    const DataSet data = load_data(o.data, o.seed);
    const auto idx = snap_control_points(data, {o.grid_h});
    const DataSet centers = subset(data, idx);
    GcvConfig gcv;
    gcv.seed = o.seed;
    const auto alpha = parse_alpha(o.alpha);

    FinalMetrics fm;
    fm.method = o.kind;
    fm.nodes = centers.size();
    fm.stop_reason = "done";
    std::function<double(Point2)> model;
    nlohmann::ordered_json cfg;
    cfg["kind"] = o.kind;
    cfg["grid_h"] = o.grid_h;
    cfg["data"] = o.data.peaks ? "peaks" : o.data.data_path;
    if (o.kind == "tps") {
        GlobalTpsFit fit = fit_global_tps(centers, gcv);
        if (alpha) {
            fit.model = fit_tps(centers, *alpha);
        }
        const auto sp = report_sparsity(fit.model);
        fm.nonzeros = sp.nonzeros;
        fm.nonzero_ratio = sp.ratio;
        fm.alpha = fit.model.alpha;
        fm.solve_time_s = fit.solve_time_s;
        model = [m = std::move(fit.model)](Point2 p) { return m.eval(p); };
    } else {
        const CsrbfKernel kernel = parse_csrbf_kernel(o.kind);
        const double rho = o.rho > 0.0 ? o.rho : choose_rho(centers.points, data, o.cover);
        cfg["rho"] = rho;
        cfg["cover"] = o.rho > 0.0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(o.cover);
        CsrbfModel fit = fit_csrbf(centers, kernel, rho, alpha, gcv);
        fm.nonzeros = fit.sparsity.nonzeros;
        fm.nonzero_ratio = fit.sparsity.ratio;
        fm.alpha = fit.alpha;
        fm.solve_time_s = fit.solve_time_s;
        model = [m = std::move(fit)](Point2 p) { return m.eval(p); };
    }
    if (o.deterministic) fm.solve_time_s = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = model(data.points[i]) - data.values[i];
        sq += r * r;
        fm.max = std::max(fm.max, std::abs(r));
    }
    fm.rmse = std::sqrt(sq / static_cast<double>(data.size()));

    RunReport report;
    report.command = "baseline";
    report.seed = o.seed;
    report.config = cfg;
    report.environment = environment_stamp(o.deterministic);
    report.final = fm;
    fs::create_directories(o.out_dir);
    write_report(fs::path(o.out_dir) / "report.jsonl", report);
    std::cout << o.kind << "  basis " << fm.nodes << "  nonzeros " << fm.nonzeros << "  ratio " << fm.nonzero_ratio
              << "  rmse " << fm.rmse << "  max " << fm.max << '\n';
    return 0;
}

int cmd_peaks(const PeaksOptions& o)
{
    PeaksSpec spec;
    spec.n = o.n;
    spec.sigma = o.sigma;
    if (!o.experiment) {
        const DataSet d = peaks_generate(spec, o.seed);
        write_xyz(o.out, d.points, d.values);
        std::cout << "wrote " << d.size() << " points to " << o.out << '\n';
        return 0;
    }
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < o.seeds; ++k) seeds.push_back(o.seed + static_cast<std::uint64_t>(k));
    const auto rows = experiment_boundary_accuracy(
        spec, seeds, o.counts, {SampleStrategy::quadtree, SampleStrategy::quadtree_boundary_band});
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!o.table.empty()) {
        file.open(o.table);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + o.table);
        out = &file;
    }
    *out << "strategy,count,seed,alpha,rmse_f,rmse_g1,rmse_g2,rmse_laplacian\n" << std::setprecision(10);
    for (const auto& r : rows) {
        *out << to_string(r.strategy) << ',' << r.count << ',' << r.seed << ',' << r.alpha << ',' << r.rmse_f << ','
             << r.rmse_g1 << ',' << r.rmse_g2 << ',' << r.rmse_laplacian << '\n';
    }
    return 0;
}

int cmd_report(const ReportOptions& o)
{
    std::vector<std::pair<std::string, RunReport>> reports;
    for (const auto& path : o.inputs) {
        fs::path p(path);
        if (fs::is_directory(p)) p /= "report.jsonl";
        reports.emplace_back(path, read_report(p));
    }
    if (o.out.empty()) {
        merge_reports_csv(std::cout, reports);
    } else {
        std::ofstream out(o.out);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + o.out);
        merge_reports_csv(out, reports);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite element thin plate spline smoothing with adaptive refinement"};
    app.require_subcommand(1);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit a smoother with uniform or adaptive refinement");
    add_data_options(fit_cmd, fit.data);
    fit_cmd->add_option("--domain", fit.domain, "square, irregular or polygon")
        ->check(CLI::IsMember({"square", "irregular", "polygon"}));
    fit_cmd->add_option("--polygon", fit.polygon_path, "polygon file for --domain polygon");
    fit_cmd->add_option("--refine", fit.refine, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
    fit_cmd->add_option("--indicator", fit.indicator, "auxiliary or recovery")
        ->check(CLI::IsMember({"auxiliary", "recovery"}));
    fit_cmd->add_option("--boundary", fit.boundary, "tps, average or constant")
        ->check(CLI::IsMember({"tps", "average", "constant"}));
    fit_cmd->add_option("--constant-value", fit.constant_value, "boundary value for --boundary constant");
    fit_cmd->add_option("--alpha", fit.alpha, "auto (GCV) or a fixed positive value");
    fit_cmd->add_option("--max-iters", fit.max_iters, "refinement iterations (0 = default)")
        ->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--trim-level", fit.trim_level, "square mesh level trimmed for irregular domains");
    fit_cmd->add_option("--initial-level", fit.initial_level, "uniform levels of the initial square mesh");
    fit_cmd->add_option("--seed", fit.seed, "random seed");
    fit_cmd->add_option("--out", fit.out_dir, "output directory");
    fit_cmd->add_flag("--no-stagnation", fit.no_stagnation, "run all iterations regardless of progress");
    fit_cmd->add_option("--tolerance", fit.tolerance, "stop once RMSE falls to this value");
    fit_cmd->add_option("--gcv-probes", fit.probes, "random probes for the GCV trace")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--tps-samples", fit.tps_samples, "points sampled for the boundary TPS");
    fit_cmd->add_option("--sample-grid", fit.sample_grid, "write an N x N grid of smoother values");
    fit_cmd->add_flag("--deterministic", fit.deterministic, "single thread, zeroed timings, no timestamp");

    BaselineOptions base;
    auto* base_cmd = app.add_subcommand("baseline", "fit a global TPS or compactly supported RBF");
    base_cmd->add_option("kind", base.kind, "tps, buhmann or wendland")
        ->required()
        ->check(CLI::IsMember({"tps", "buhmann", "wendland"}));
    add_data_options(base_cmd, base.data);
    auto* cover = base_cmd->add_option("--cover", base.cover, "data points covered by each support");
    auto* rho = base_cmd->add_option("--rho", base.rho, "support radius");
    cover->excludes(rho);
    base_cmd->add_option("--grid-h", base.grid_h, "control point grid spacing")->check(CLI::PositiveNumber);
    base_cmd->add_option("--alpha", base.alpha, "auto (GCV) or a fixed positive value");
    base_cmd->add_option("--seed", base.seed, "random seed");
    base_cmd->add_option("--out", base.out_dir, "output directory");
    base_cmd->add_flag("--deterministic", base.deterministic, "zeroed timings, no timestamp");

    PeaksOptions pk;
    auto* peaks_cmd = app.add_subcommand("peaks", "generate peaks data or run the boundary TPS experiment");
    peaks_cmd->add_option("--n", pk.n, "number of points");
    peaks_cmd->add_option("--sigma", pk.sigma, "noise standard deviation");
    peaks_cmd->add_option("--seed", pk.seed, "random seed");
    peaks_cmd->add_option("--out", pk.out, "CSV output for generated data");
    peaks_cmd->add_flag("--experiment", pk.experiment, "run the boundary approximation experiment");
    peaks_cmd->add_option("--counts", pk.counts, "sample counts for the experiment")->delimiter(',');
    peaks_cmd->add_option("--seeds", pk.seeds, "number of seeds for the experiment")->check(CLI::PositiveNumber);
    peaks_cmd->add_option("--table", pk.table, "CSV output for the experiment table");

    ReportOptions rep;
    auto* report_cmd = app.add_subcommand("report", "merge run reports into one CSV table");
    report_cmd->add_option("inputs", rep.inputs, "report files or run directories")->required();
    report_cmd->add_option("--out", rep.out, "CSV output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit);
        if (*base_cmd) return cmd_baseline(base);
        if (*peaks_cmd) return cmd_peaks(pk);
        if (*report_cmd) return cmd_report(rep);
    } catch (const Error& e) {
        std::cerr << "tpsfem: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::IoError:
        case ErrorCode::ParseError:
            return kExitIo;
        case ErrorCode::InvalidArgument:
            return kExitUsage;
        default:
            return kExitNumerical;
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "tpsfem: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}
