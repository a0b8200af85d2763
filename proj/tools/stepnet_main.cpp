// stepnet: run queuing-discipline experiments on a step-topology network.

#include "stepnet/engine.hpp"
#include "stepnet/report.hpp"
#include "stepnet/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace stepnet;

struct RunOptions {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string qdisc;
    std::optional<double> duration;
    std::string out = "stepnet-out";
    std::string detail;
    bool charts = false;
};

std::optional<ScenarioConfig> load_or_report(const std::string &path)
{
    ParseResult r = load_scenario(path);
    if (!r.ok()) {
        std::cerr << format_diagnostics(r.errors, path);
        return std::nullopt;
    }
    return std::move(*r.config);
}

// Command-line overrides go through the same validation as the file.
bool apply_overrides(ScenarioConfig &cfg, const RunOptions &o)
{
    if (!o.qdisc.empty()) {
        auto k = parse_qdisc_kind(o.qdisc);
        if (!k) {
            std::cerr << "--qdisc must be fifo, pq or wfq, got '" << o.qdisc << "'\n";
            return false;
        }
        cfg.qdisc.kind = *k;
    }
    if (o.duration) {
        cfg.sim.duration = *o.duration;
    }
    if (!o.detail.empty()) {
        if (o.detail != "per-hop" && o.detail != "none") {
            std::cerr << "--detail must be per-hop or none\n";
            return false;
        }
        cfg.sim.per_hop = o.detail == "per-hop";
    }
    if (auto errors = validate(cfg); !errors.empty()) {
        std::cerr << format_diagnostics(errors, o.scenario);
        return false;
    }
    return true;
}

// Console only; files keep the full precision of format_number.
std::string brief(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_summary(std::ostream &os, const RunResult &r)
{
    const Summary s = summarize(r.metrics);
    os << "qdisc " << name_of(r.config.qdisc.kind) << ", seed " << r.config.sim.seed << ", "
       << r.summary.events_processed << " events, clock " << r.summary.final_clock << " s\n";
    os << std::left << std::setw(12) << "class" << std::right << std::setw(10) << "sent" << std::setw(11)
       << "delivered" << std::setw(10) << "dropped" << std::setw(10) << "inflight" << std::setw(14) << "mean_delay_s"
       << std::setw(14) << "delay_var_s2" << std::setw(16) << "throughput_bps" << '\n';
    auto row = [&](std::string_view name, const ClassSummary &c) {
        os << std::left << std::setw(12) << name << std::right << std::setw(10) << c.sent << std::setw(11)
           << c.delivered << std::setw(10) << c.dropped << std::setw(10) << c.in_flight << std::setw(14)
           << brief(c.mean_delay) << std::setw(14) << brief(c.delay_variance) << std::setw(16)
           << brief(c.throughput_bps) << '\n';
    };
    for (TrafficClass c : kAllClasses) {
        row(name_of(c), s.per_class[index_of(c)]);
    }
    row("total", s.total);
}

void emit(const RunResult &r, const std::filesystem::path &dir, bool charts)
{
    emit_csv(r, dir);
    if (charts) {
        emit_svg(r, dir);
    }
}

int cmd_validate(const std::string &path)
{
    auto cfg = load_or_report(path);
    if (!cfg) {
        return 1;
    }
    std::size_t replicas = 0;
    for (const auto &f : cfg->flows) {
        replicas += f.count;
    }
    std::cout << path << ": ok (" << cfg->hosts.size() << " hosts, " << cfg->flows.size() << " flow sections, "
              << replicas << " flows, qdisc " << name_of(cfg->qdisc.kind) << ")\n";
    return 0;
}

int cmd_run(const RunOptions &o)
{
    auto cfg = load_or_report(o.scenario);
    if (!cfg || !apply_overrides(*cfg, o)) {
        return 1;
    }
    RunResult r = run_scenario(*cfg, o.seed);
    emit(r, o.out, o.charts);
    print_summary(std::cout, r);
    std::cout << "wrote " << o.out << '\n';
    return 0;
}

int cmd_sweep(const RunOptions &o, const std::string &kinds)
{
    auto base = load_or_report(o.scenario);
    if (!base) {
        return 1;
    }
    std::vector<ScenarioConfig> configs;
    std::stringstream ss(kinds);
    std::string kind;
    while (std::getline(ss, kind, ',')) {
        RunOptions each = o;
        each.qdisc = kind;
        ScenarioConfig cfg = *base;
        if (!apply_overrides(cfg, each)) {
            return 1;
        }
        configs.push_back(std::move(cfg));
    }
    if (configs.empty()) {
        std::cerr << "--qdisc needs at least one discipline\n";
        return 1;
    }

    // one engine per task; each writes only its own subdirectory
    std::vector<std::future<RunResult>> jobs;
    for (const auto &cfg : configs) {
        jobs.push_back(std::async(std::launch::async, [&cfg, &o] {
            RunResult r = run_scenario(cfg, o.seed);
            emit(r, std::filesystem::path(o.out) / std::string(name_of(cfg.qdisc.kind)), o.charts);
            return r;
        }));
    }
    std::vector<RunResult> results;
    for (auto &j : jobs) {
        results.push_back(j.get());
    }
    for (const auto &r : results) {
        print_summary(std::cout, r);
        std::cout << '\n';
    }
    std::cout << "wrote " << emit_comparison(results, o.out).string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Step-topology QoS network simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto *run = app.add_subcommand("run", "run one scenario and write CSV reports");
    run->add_option("scenario", run_opts.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", run_opts.seed, "override the master seed");
    run->add_option("--qdisc", run_opts.qdisc, "override the queuing discipline (fifo|pq|wfq)");
    run->add_option("--duration", run_opts.duration, "override the simulated duration in seconds");
    run->add_option("--out", run_opts.out, "output directory")->capture_default_str();
    run->add_option("--detail", run_opts.detail, "per-hop records queuing delay per router");
    run->add_flag("--charts", run_opts.charts, "also write SVG charts");

    std::string validate_path;
    auto *val = app.add_subcommand("validate", "check a scenario file and list every problem");
    val->add_option("scenario", validate_path, "scenario file")->required();

    RunOptions sweep_opts;
    std::string sweep_kinds = "fifo,pq,wfq";
    auto *sweep = app.add_subcommand("sweep", "run a scenario under several disciplines and compare");
    sweep->add_option("scenario", sweep_opts.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--qdisc", sweep_kinds, "comma-separated disciplines")->capture_default_str();
    sweep->add_option("--out", sweep_opts.out, "output directory")->required();
    sweep->add_option("--seed", sweep_opts.seed, "override the master seed");
    sweep->add_option("--duration", sweep_opts.duration, "override the simulated duration in seconds");
    sweep->add_option("--detail", sweep_opts.detail, "per-hop records queuing delay per router");
    sweep->add_flag("--charts", sweep_opts.charts, "also write SVG charts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return cmd_run(run_opts);
        }
        if (*val) {
            return cmd_validate(validate_path);
        }
        if (*sweep) {
            return cmd_sweep(sweep_opts, sweep_kinds);
        }
    } catch (const std::exception &e) {
        std::cerr << "stepnet: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
