#pragma once

#include "stepnet/engine.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stepnet {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decimal rendering used for every number in emitted files (12 significant digits).
std::string format_number(double v);

/// Header shared by summary.csv and comparison.csv (after the leading columns).
inline constexpr const char *kSummaryColumns =
    "sent,delivered,dropped,mean_delay_s,delay_var_s2,throughput_bps,in_flight,max_delay_s,jitter_s";

std::string summary_row(const ClassSummary &s);

/// One named time series as written to `<metric>.<class>.csv`.
struct Series {
    std::string metric; // e.g. "e2e_delay"
    std::string subject; // class or node name
    std::string y_label; // axis label with unit
    std::vector<std::pair<double, double>> points;

    std::string file_stem() const { return metric + "." + subject; }
};

/// Every series emitted for a run: per class that sent anything, and per
/// router when per-hop detail is on.
std::vector<Series> collect_series(const RunResult &r);

/// summary.csv plus one `<metric>.<subject>.csv` per series. Returns the paths written.
std::vector<std::filesystem::path> emit_csv(const RunResult &r, const std::filesystem::path &out_dir);

/// One static SVG line chart per drops / delay variation / traffic received /
/// e2e delay series.
std::vector<std::filesystem::path> emit_svg(const RunResult &r, const std::filesystem::path &out_dir);

std::string render_svg(const Series &s);

/// Reads back a `time_s,value` file.
std::vector<std::pair<double, double>> read_series_csv(const std::filesystem::path &file);

/// comparison.csv for a sweep: one row per (qdisc, class) plus totals.
std::filesystem::path emit_comparison(const std::vector<RunResult> &runs, const std::filesystem::path &out_dir);

} // namespace stepnet
