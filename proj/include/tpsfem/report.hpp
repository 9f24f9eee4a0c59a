#pragma once

#include "tpsfem/driver.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tpsfem {

inline constexpr const char* kReportSchema = "tpsfem-report v1";

struct FinalMetrics {
    std::string method;                       ///< "tpsfem", "tps", "buhmann", "wendland"
    std::size_t nodes = 0;                    ///< nodes or basis functions
    std::size_t nonzeros = 0;
    double nonzero_ratio = 0.0;
    double alpha = 0.0;
    double solve_time_s = 0.0;
    double rmse = 0.0;
    double max = 0.0;
    std::optional<double> near_boundary_ratio;
    std::size_t dropped_points = 0;
    std::string stop_reason;

    friend bool operator==(const FinalMetrics&, const FinalMetrics&) = default;
};

struct RunFailure {
    std::string code;
    std::string message;

    friend bool operator==(const RunFailure&, const RunFailure&) = default;
};

/// Self-describing run report, serialized as JSON lines: a header line, one
/// line per iteration and a final (or failure) line.
struct RunReport {
    std::string command;              ///< "fit" or "baseline"
    std::uint64_t seed = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    nlohmann::ordered_json environment = nlohmann::ordered_json::object();
    std::vector<IterationRecord> iterations;
    std::optional<FinalMetrics> final;
    std::optional<RunFailure> failure;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::ordered_json to_json(const IterationRecord& rec);
IterationRecord iteration_from_json(const nlohmann::ordered_json& j);

/// Compiler and library versions; adds a wall-clock stamp unless `reproducible`.
nlohmann::ordered_json environment_stamp(bool reproducible);

/// Configuration echo of a run.
nlohmann::ordered_json config_json(const RunConfig& cfg);

void write_report(std::ostream& out, const RunReport& report);
void write_report(const std::filesystem::path& path, const RunReport& report);
/// Throws ParseError for malformed lines or an unknown schema.
RunReport read_report(std::istream& in);
RunReport read_report(const std::filesystem::path& path);

/// Streaming writer: header first, then records as they arrive.
class ReportWriter {
public:
    explicit ReportWriter(std::ostream& out) : out_(&out) {}
    void header(const RunReport& report);
    void iteration(const IterationRecord& rec);
    void final(const FinalMetrics& metrics);
    void failure(const RunFailure& failure);

private:
    std::ostream* out_;
};

/// Column names of the merged CSV, in output order.
const std::vector<std::string>& report_csv_columns();
/// One row per report, columns in report_csv_columns() order.
void merge_reports_csv(std::ostream& out, const std::vector<std::pair<std::string, RunReport>>& reports);

} // namespace tpsfem
