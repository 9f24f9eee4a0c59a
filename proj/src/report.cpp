#include "tpsfem/report.hpp"

#include "tpsfem/error.hpp"

#include <Eigen/Core>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tpsfem {

namespace {

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

json to_json(const FinalMetrics& m)
{
    json j;
    j["type"] = "final";
    j["method"] = m.method;
    j["nodes"] = m.nodes;
    j["nonzeros"] = m.nonzeros;
    j["nonzero_ratio"] = m.nonzero_ratio;
    j["alpha"] = m.alpha;
    j["solve_time_s"] = m.solve_time_s;
    j["rmse"] = m.rmse;
    j["max"] = m.max;
    j["near_boundary_ratio"] = optional_number(m.near_boundary_ratio);
    j["dropped_points"] = m.dropped_points;
    j["stop_reason"] = m.stop_reason;
    return j;
}

FinalMetrics final_from_json(const json& j)
{
    FinalMetrics m;
    m.method = j.at("method").get<std::string>();
    m.nodes = j.at("nodes").get<std::size_t>();
    m.nonzeros = j.at("nonzeros").get<std::size_t>();
    m.nonzero_ratio = j.at("nonzero_ratio").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.solve_time_s = j.at("solve_time_s").get<double>();
    m.rmse = j.at("rmse").get<double>();
    m.max = j.at("max").get<double>();
    m.near_boundary_ratio = read_optional(j, "near_boundary_ratio");
    m.dropped_points = j.at("dropped_points").get<std::size_t>();
    m.stop_reason = j.at("stop_reason").get<std::string>();
    return m;
}

std::string csv_number(double v)
{
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

json to_json(const IterationRecord& rec)
{
    json j;
    j["type"] = "iteration";
    j["iteration"] = rec.iteration;
    j["nodes"] = rec.nodes;
    j["triangles"] = rec.triangles;
    j["alpha"] = rec.alpha;
    j["gcv_score"] = rec.gcv_score;
    j["rmse"] = rec.rmse;
    j["max"] = rec.max_residual;
    j["solve_time_s"] = rec.solve_time_s;
    j["near_boundary_ratio"] = optional_number(rec.near_boundary_ratio);
    j["marked_edges"] = rec.marked_edges;
    j["refined_edges"] = rec.refined_edges;
    j["waves"] = rec.waves;
    j["dropped_points"] = rec.dropped_points;
    j["solver"] = rec.solver;
    j["relative_residual"] = rec.relative_residual;
    j["indicator_histogram"] = rec.indicator_histogram;
    return j;
}

IterationRecord iteration_from_json(const json& j)
{
    IterationRecord r;
    r.iteration = j.at("iteration").get<int>();
    r.nodes = j.at("nodes").get<std::size_t>();
    r.triangles = j.at("triangles").get<std::size_t>();
    r.alpha = j.at("alpha").get<double>();
    r.gcv_score = j.at("gcv_score").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.max_residual = j.at("max").get<double>();
    r.solve_time_s = j.at("solve_time_s").get<double>();
    r.near_boundary_ratio = read_optional(j, "near_boundary_ratio");
    r.marked_edges = j.at("marked_edges").get<std::size_t>();
    r.refined_edges = j.at("refined_edges").get<std::size_t>();
    r.waves = j.at("waves").get<std::size_t>();
    r.dropped_points = j.at("dropped_points").get<std::size_t>();
    r.solver = j.at("solver").get<std::string>();
    r.relative_residual = j.at("relative_residual").get<double>();
    r.indicator_histogram = j.at("indicator_histogram").get<std::vector<std::size_t>>();
    return r;
}

json environment_stamp(bool reproducible)
{
    json j;
    j["compiler"] = __VERSION__;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["threads"] = 1;
    j["reproducible"] = reproducible;
    if (!reproducible) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream s;
        s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        j["timestamp"] = s.str();
    }
    return j;
}

json config_json(const RunConfig& cfg)
{
    json j;
    j["domain"] = cfg.polygon ? "polygon" : to_string(cfg.domain);
    j["initial_level"] = cfg.initial_level;
    j["trim_level"] = cfg.trim_level;
    j["refine"] = to_string(cfg.refine);
    j["indicator"] = to_string(cfg.indicator);
    j["boundary"] = to_string(cfg.boundary);
    j["constant_value"] = cfg.constant_value;
    j["max_iters"] = cfg.resolved_max_iters();
    j["rmse_tolerance"] = optional_number(cfg.rmse_tolerance);
    j["stop_on_stagnation"] = cfg.stop_on_stagnation;
    j["alpha"] = cfg.fixed_alpha ? json(*cfg.fixed_alpha) : json("auto");
    j["gcv_probes"] = cfg.gcv.probes;
    j["gcv_grid"] = cfg.gcv.alpha_grid;
    j["gcv_refine_iters"] = cfg.gcv.refine_iters;
    j["tps_sample"] = {{"strategy", to_string(cfg.tps_sample.strategy)}, {"count", cfg.tps_sample.count}};
    j["marking_gamma"] = cfg.marking_gamma;
    j["near_boundary_radius"] = cfg.near_boundary_radius;
    j["seed"] = cfg.seed;
    return j;
}

void ReportWriter::header(const RunReport& report)
{
    json j;
    j["type"] = "run_header";
    j["schema"] = kReportSchema;
    j["command"] = report.command;
    j["seed"] = report.seed;
    j["config"] = report.config;
    j["environment"] = report.environment;
    *out_ << j.dump() << '\n' << std::flush;
}

void ReportWriter::iteration(const IterationRecord& rec)
{
    *out_ << to_json(rec).dump() << '\n' << std::flush;
}

void ReportWriter::final(const FinalMetrics& metrics)
{
    *out_ << to_json(metrics).dump() << '\n' << std::flush;
}

void ReportWriter::failure(const RunFailure& f)
{
    json j;
    j["type"] = "failure";
    j["code"] = f.code;
    j["message"] = f.message;
    *out_ << j.dump() << '\n' << std::flush;
}

void write_report(std::ostream& out, const RunReport& report)
{
    ReportWriter w(out);
    w.header(report);
    for (const auto& rec : report.iterations) w.iteration(rec);
    if (report.final) w.final(*report.final);
    if (report.failure) w.failure(*report.failure);
}

void write_report(const std::filesystem::path& path, const RunReport& report)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    write_report(out, report);
}

RunReport read_report(std::istream& in)
{
    RunReport r;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "run_header") {
                if (j.at("schema").get<std::string>() != kReportSchema) {
                    throw Error(ErrorCode::ParseError, "unsupported schema " + j.at("schema").dump());
                }
                r.command = j.at("command").get<std::string>();
                r.seed = j.at("seed").get<std::uint64_t>();
                r.config = j.at("config");
                r.environment = j.at("environment");
                have_header = true;
            } else if (type == "iteration") {
                r.iterations.push_back(iteration_from_json(j));
            } else if (type == "final") {
                r.final = final_from_json(j);
            } else if (type == "failure") {
                r.failure = RunFailure{j.at("code").get<std::string>(), j.at("message").get<std::string>()};
            } else {
                throw Error(ErrorCode::ParseError, "unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "report line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_header) {
        throw Error(ErrorCode::ParseError, "report has no header line");
    }
    return r;
}

RunReport read_report(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_report(in);
}

const std::vector<std::string>& report_csv_columns()
{
    static const std::vector<std::string> cols{
        "source", "command", "method", "domain", "refine", "indicator", "boundary", "seed",
        "iterations", "nodes", "nonzeros", "nonzero_ratio", "alpha", "solve_time_s", "rmse", "max",
        "near_boundary_ratio", "dropped_points", "stop_reason", "failure"};
    return cols;
}

void merge_reports_csv(std::ostream& out, const std::vector<std::pair<std::string, RunReport>>& reports)
{
    const auto& cols = report_csv_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    auto cfg_str = [](const RunReport& r, const char* key) {
        if (!r.config.contains(key)) return std::string();
        const auto& v = r.config.at(key);
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    for (const auto& [source, r] : reports) {
        const FinalMetrics m = r.final.value_or(FinalMetrics{});
        std::vector<std::string> row{
            csv_field(source),
            r.command,
            m.method,
            cfg_str(r, "domain"),
            cfg_str(r, "refine"),
            cfg_str(r, "indicator"),
            cfg_str(r, "boundary"),
            std::to_string(r.seed),
            std::to_string(r.iterations.size()),
            std::to_string(m.nodes),
            std::to_string(m.nonzeros),
            csv_number(m.nonzero_ratio),
            csv_number(m.alpha),
            csv_number(m.solve_time_s),
            csv_number(m.rmse),
            csv_number(m.max),
            m.near_boundary_ratio ? csv_number(*m.near_boundary_ratio) : std::string(),
            std::to_string(m.dropped_points),
            csv_field(m.stop_reason),
            r.failure ? csv_field(r.failure->code + ": " + r.failure->message) : std::string(),
        };
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
        out << '\n';
    }
}

} // namespace tpsfem
