#include "stepnet/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace stepnet {

namespace fs = std::filesystem;

std::string format_number(double v)
{
    if (v == 0.0) {
        return "0"; // also folds -0
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string summary_row(const ClassSummary &s)
{
    std::ostringstream os;
    os << s.sent << ',' << s.delivered << ',' << s.dropped << ',' << format_number(s.mean_delay) << ','
       << format_number(s.delay_variance) << ',' << format_number(s.throughput_bps) << ',' << s.in_flight << ','
       << format_number(s.max_delay) << ',' << format_number(s.jitter);
    return os.str();
}

namespace {

void ensure_dir(const fs::path &dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ReportError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

void write_file(const fs::path &file, const std::string &content)
{
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ReportError("cannot write " + file.string());
    }
    out << content;
    out.flush();
    if (!out) {
        throw ReportError("write failed for " + file.string());
    }
}

template <class Points, class Fn>
std::vector<std::pair<double, double>> to_pairs(const Points &pts, Fn value)
{
    std::vector<std::pair<double, double>> out;
    out.reserve(pts.size());
    for (const auto &p : pts) {
        out.emplace_back(p.time, value(p));
    }
    return out;
}

bool charted(const std::string &metric)
{
    return metric == "drops" || metric == "delay_variation" || metric == "traffic_received" ||
           metric == "e2e_delay" || metric == "queuing_delay";
}

} // namespace

std::vector<Series> collect_series(const RunResult &r)
{
    std::vector<Series> out;
    const Summary sum = summarize(r.metrics);
    for (TrafficClass c : kAllClasses) {
        if (sum.per_class[index_of(c)].sent == 0) {
            continue;
        }
        const std::string cls(name_of(c));
        const auto tr = traffic_received(r.metrics, c);
        out.push_back({"drops", cls, "drops per second (pkt/s)",
                       to_pairs(drops(r.metrics, c).rate, [](const SeriesPoint &p) { return p.value; })});
        out.push_back({"e2e_delay", cls, "mean end-to-end delay (s)",
                       to_pairs(e2e_delay_series(r.metrics, c), [](const SeriesPoint &p) { return p.value; })});
        out.push_back({"delay_variation", cls, "delay variance (s^2)",
                       to_pairs(delay_variation_series(r.metrics, c), [](const SeriesPoint &p) { return p.value; })});
        out.push_back({"traffic_received", cls, "traffic received (bytes/s)",
                       to_pairs(tr, [](const ThroughputPoint &p) { return p.bytes_per_s; })});
        out.push_back({"traffic_received_pps", cls, "traffic received (pkt/s)",
                       to_pairs(tr, [](const ThroughputPoint &p) { return p.packets_per_s; })});
    }
    if (r.metrics.options().per_hop) {
        for (const Node &n : r.topology.nodes()) {
            if (n.kind == NodeKind::Router) {
                out.push_back({"queuing_delay", n.name, "mean queuing delay (s)",
                               to_pairs(queuing_delay(r.metrics, n.id), [](const SeriesPoint &p) { return p.value; })});
            }
        }
    }
    return out;
}

std::vector<fs::path> emit_csv(const RunResult &r, const fs::path &out_dir)
{
    ensure_dir(out_dir);
    std::vector<fs::path> written;

    const Summary sum = summarize(r.metrics);
    std::ostringstream os;
    os << "class," << kSummaryColumns << '\n';
    for (TrafficClass c : kAllClasses) {
        os << name_of(c) << ',' << summary_row(sum.per_class[index_of(c)]) << '\n';
    }
    os << "total," << summary_row(sum.total) << '\n';
    written.push_back(out_dir / "summary.csv");
    write_file(written.back(), os.str());

    for (const Series &s : collect_series(r)) {
        std::ostringstream ss;
        ss << "time_s,value\n";
        for (const auto &[t, v] : s.points) {
            ss << format_number(t) << ',' << format_number(v) << '\n';
        }
        written.push_back(out_dir / (s.file_stem() + ".csv"));
        write_file(written.back(), ss.str());
    }
    return written;
}

std::string render_svg(const Series &s)
{
    constexpr double W = 640, H = 400, left = 80, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << s.metric << " (" << s.subject << ")</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">time (s)</text>\n";
    os << "<text x=\"15\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 15 " << top + ph / 2
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << s.y_label << "</text>\n";

    if (s.points.empty()) {
        os << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph / 2
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\"gray\">no data</text>\n";
        os << "</svg>\n";
        return os.str();
    }

    double x0 = s.points.front().first, x1 = x0, y1 = 0.0, y0 = 0.0;
    for (const auto &[x, y] : s.points) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) {
        x1 = x0 + 1.0;
    }
    if (y1 == y0) {
        y1 = y0 + 1.0;
    }
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    for (const auto &[val, anchor, px, py] :
         {std::tuple{x0, "middle", sx(x0), top + ph + 18}, std::tuple{x1, "middle", sx(x1), top + ph + 18}}) {
        os << "<text x=\"" << px << "\" y=\"" << py << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"10\">" << format_number(val) << "</text>\n";
    }
    for (double val : {y0, y1}) {
        os << "<text x=\"" << left - 6 << "\" y=\"" << sy(val) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_number(val)
           << "</text>\n";
    }

    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) {
            os << ' ';
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f", sx(s.points[i].first), sy(s.points[i].second));
        os << buf;
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

std::vector<fs::path> emit_svg(const RunResult &r, const fs::path &out_dir)
{
    ensure_dir(out_dir);
    std::vector<fs::path> written;
    for (const Series &s : collect_series(r)) {
        if (!charted(s.metric)) {
            continue;
        }
        written.push_back(out_dir / (s.file_stem() + ".svg"));
        write_file(written.back(), render_svg(s));
    }
    return written;
}

std::vector<std::pair<double, double>> read_series_csv(const fs::path &file)
{
    std::ifstream in(file);
    if (!in) {
        throw ReportError("cannot read " + file.string());
    }
    std::string line;
    std::getline(in, line);
    if (line != "time_s,value") {
        throw ReportError(file.string() + ": unexpected header '" + line + "'");
    }
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ReportError(file.string() + ": malformed row '" + line + "'");
        }
        double t = 0.0, v = 0.0;
        const char *b = line.data();
        const char *e = b + line.size();
        auto r1 = std::from_chars(b, b + comma, t);
        auto r2 = std::from_chars(b + comma + 1, e, v);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != e) {
            throw ReportError(file.string() + ": malformed row '" + line + "'");
        }
        out.emplace_back(t, v);
    }
    return out;
}

fs::path emit_comparison(const std::vector<RunResult> &runs, const fs::path &out_dir)
{
    ensure_dir(out_dir);
    std::ostringstream os;
    os << "qdisc,class," << kSummaryColumns << '\n';
    for (const RunResult &r : runs) {
        const Summary sum = summarize(r.metrics);
        const auto q = name_of(r.config.qdisc.kind);
        for (TrafficClass c : kAllClasses) {
            os << q << ',' << name_of(c) << ',' << summary_row(sum.per_class[index_of(c)]) << '\n';
        }
        os << q << ",total," << summary_row(sum.total) << '\n';
    }
    const fs::path file = out_dir / "comparison.csv";
    write_file(file, os.str());
    return file;
}

} // namespace stepnet
