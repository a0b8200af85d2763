#include "stepnet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace stepnet {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string kind;  // sim, topology, qdisc, host, flow
    std::string label; // host/flow name
    int line = 0;
    std::vector<Entry> entries;
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Parser {
public:
    explicit Parser(std::string_view text) { split(text); }

    ParseResult run()
    {
        ScenarioConfig cfg;
        std::set<std::string> seen;
        for (const Section &s : sections_) {
            if (s.kind == "sim" || s.kind == "topology" || s.kind == "qdisc") {
                if (!seen.insert(s.kind).second) {
                    error(s.line, "duplicate [" + s.kind + "] section");
                    continue;
                }
            }
            if (s.kind == "sim") {
                read_sim(s, cfg.sim);
            } else if (s.kind == "topology") {
                read_topology(s, cfg.topology);
            } else if (s.kind == "qdisc") {
                read_qdisc(s, cfg.qdisc);
            } else if (s.kind == "host") {
                cfg.hosts.push_back(read_host(s));
            } else if (s.kind == "flow") {
                cfg.flows.push_back(read_flow(s));
            } else {
                error(s.line, "unknown section [" + s.kind + "]");
            }
        }
        for (const char *required : {"sim", "topology", "qdisc"}) {
            if (!seen.count(required)) {
                error(0, std::string("missing required section [") + required + "]");
            }
        }
        if (cfg.flows.empty()) {
            error(0, "missing required section [flow <name>]: scenario declares no traffic");
        }
        if (errors_.empty()) {
            for (auto &d : validate(cfg)) {
                errors_.push_back(std::move(d));
            }
        }
        ParseResult r;
        if (errors_.empty()) {
            r.config = std::move(cfg);
        }
        std::stable_sort(errors_.begin(), errors_.end(),
                         [](const Diagnostic &a, const Diagnostic &b) { return a.line < b.line; });
        r.errors = std::move(errors_);
        return r;
    }

private:
    void error(int line, std::string msg) { errors_.push_back(Diagnostic{line, std::move(msg)}); }

    void split(std::string_view text)
    {
        int line_no = 0;
        Section *current = nullptr;
        while (!text.empty()) {
            ++line_no;
            const auto nl = text.find('\n');
            std::string_view line = text.substr(0, nl);
            text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    error(line_no, "malformed section header");
                    current = nullptr;
                    continue;
                }
                const auto inner = trim(line.substr(1, line.size() - 2));
                const auto sp = inner.find_first_of(" \t");
                Section s;
                s.kind = std::string(inner.substr(0, sp));
                s.label = sp == std::string_view::npos ? "" : std::string(trim(inner.substr(sp)));
                s.line = line_no;
                if ((s.kind == "host" || s.kind == "flow") && s.label.empty()) {
                    error(line_no, "[" + s.kind + "] section needs a name, e.g. [" + s.kind + " a]");
                }
                sections_.push_back(std::move(s));
                current = &sections_.back();
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                error(line_no, "expected key = value");
                continue;
            }
            if (!current) {
                error(line_no, "key outside of any section");
                continue;
            }
            current->entries.push_back(
                Entry{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no});
        }
    }

    // Typed field readers. Each reports its own error and leaves the target untouched.
    bool number(const Entry &e, double &out)
    {
        double v = 0.0;
        const char *b = e.value.data();
        const char *end = b + e.value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc{} || p != end || !std::isfinite(v)) {
            error(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool positive(const Entry &e, double &out)
    {
        double v = 0.0;
        if (!number(e, v)) {
            return false;
        }
        if (!(v > 0.0)) {
            error(e.line, "'" + e.key + "' must be positive, got " + e.value);
            return false;
        }
        out = v;
        return true;
    }

    bool non_negative(const Entry &e, double &out)
    {
        double v = 0.0;
        if (!number(e, v)) {
            return false;
        }
        if (v < 0.0) {
            error(e.line, "'" + e.key + "' must not be negative, got " + e.value);
            return false;
        }
        out = v;
        return true;
    }

    template <class Int>
    bool integer(const Entry &e, Int &out, Int min_value)
    {
        Int v{};
        const char *b = e.value.data();
        const char *end = b + e.value.size();
        auto [p, ec] = std::from_chars(b, end, v);
        if (ec != std::errc{} || p != end) {
            error(e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
            return false;
        }
        if (v < min_value) {
            error(e.line, "'" + e.key + "' must be at least " + std::to_string(min_value) + ", got " + e.value);
            return false;
        }
        out = v;
        return true;
    }

    void unknown(const Section &s, const Entry &e)
    {
        error(e.line, "unknown key '" + e.key + "' in [" + s.kind + (s.label.empty() ? "" : " " + s.label) + "]");
    }

    void require(const Section &s, const std::set<std::string> &present, std::initializer_list<const char *> keys)
    {
        for (const char *k : keys) {
            if (!present.count(k)) {
                error(s.line, "[" + s.kind + (s.label.empty() ? "" : " " + s.label) + "] is missing required key '" +
                                  k + "'");
            }
        }
    }

    std::set<std::string> keys_of(const Section &s)
    {
        std::set<std::string> out;
        for (const auto &e : s.entries) {
            if (!out.insert(e.key).second) {
                error(e.line, "duplicate key '" + e.key + "'");
            }
        }
        return out;
    }

    void read_sim(const Section &s, SimSection &sim)
    {
        const auto present = keys_of(s);
        require(s, present, {"duration"});
        for (const auto &e : s.entries) {
            if (e.key == "duration") {
                positive(e, sim.duration);
            } else if (e.key == "seed") {
                integer<std::uint64_t>(e, sim.seed, 0);
            } else if (e.key == "window") {
                positive(e, sim.window);
            } else if (e.key == "warmup") {
                non_negative(e, sim.warmup);
            } else if (e.key == "detail") {
                if (e.value == "per-hop") {
                    sim.per_hop = true;
                } else if (e.value == "none") {
                    sim.per_hop = false;
                } else {
                    error(e.line, "'detail' must be 'none' or 'per-hop', got '" + e.value + "'");
                }
            } else {
                unknown(s, e);
            }
        }
    }

    void read_topology(const Section &s, TopologySection &t)
    {
        const auto present = keys_of(s);
        require(s, present, {"steps", "nodes_per_step"});
        for (const auto &e : s.entries) {
            if (e.key == "steps") {
                integer<std::uint32_t>(e, t.step.steps, 1);
            } else if (e.key == "nodes_per_step") {
                integer<std::uint32_t>(e, t.step.nodes_per_step, 1);
            } else if (e.key == "link_rate") {
                positive(e, t.step.link.rate_bps);
            } else if (e.key == "prop_delay") {
                non_negative(e, t.step.link.propagation_delay);
            } else if (e.key == "processing_delay") {
                non_negative(e, t.processing_delay);
            } else {
                unknown(s, e);
            }
        }
    }

    void read_qdisc(const Section &s, QdiscConfig &q)
    {
        const auto present = keys_of(s);
        require(s, present, {"kind"});
        const Entry *weight_key = nullptr;
        for (const auto &e : s.entries) {
            if (e.key == "kind") {
                if (auto k = parse_qdisc_kind(e.value)) {
                    q.kind = *k;
                } else {
                    error(e.line, "'kind' must be fifo, pq or wfq, got '" + e.value + "'");
                }
            } else if (e.key == "fifo_capacity") {
                integer<std::size_t>(e, q.fifo_capacity, 1);
            } else if (e.key == "wfq_capacity") {
                integer<std::size_t>(e, q.wfq_capacity, 1);
            } else if (auto c = class_suffix(e.key, "pq_capacity_")) {
                integer<std::size_t>(e, q.pq_capacity[index_of(*c)], 1);
            } else if (auto w = class_suffix(e.key, "wfq_weight_")) {
                integer<std::uint32_t>(e, q.wfq_weights[index_of(*w)], 1);
                weight_key = &e;
            } else {
                unknown(s, e);
            }
        }
        if (weight_key && present.count("kind") && q.kind != QdiscKind::WeightedRoundRobin) {
            error(weight_key->line,
                  "'" + weight_key->key + "' only applies to kind = wfq, kind is " + std::string(name_of(q.kind)));
        }
    }

    static std::optional<TrafficClass> class_suffix(std::string_view key, std::string_view prefix)
    {
        if (key.substr(0, prefix.size()) != prefix) {
            return std::nullopt;
        }
        const auto rest = key.substr(prefix.size());
        for (TrafficClass c : kAllClasses) {
            if (rest == name_of(c)) {
                return c;
            }
        }
        return std::nullopt;
    }

    HostDecl read_host(const Section &s)
    {
        HostDecl h;
        h.name = s.label;
        h.line = s.line;
        const auto present = keys_of(s);
        require(s, present, {"router"});
        for (const auto &e : s.entries) {
            if (e.key == "router") {
                integer<NodeId>(e, h.router, 0);
            } else if (e.key == "link_rate") {
                double v = 0.0;
                if (positive(e, v)) {
                    h.link_rate = v;
                }
            } else if (e.key == "prop_delay") {
                double v = 0.0;
                if (non_negative(e, v)) {
                    h.prop_delay = v;
                }
            } else {
                unknown(s, e);
            }
        }
        return h;
    }

    FlowDecl read_flow(const Section &s)
    {
        FlowDecl f;
        f.name = s.label;
        f.line = s.line;
        const auto present = keys_of(s);
        require(s, present, {"app", "src", "dst"});

        // app first: it decides which parameter keys are legal
        for (const auto &e : s.entries) {
            if (e.key != "app") {
                continue;
            }
            if (e.value == "voip") {
                f.app = AppKind::Voip;
                f.params = VoipParams{};
            } else if (e.value == "video") {
                f.app = AppKind::Video;
                f.params = VideoParams{};
            } else if (e.value == "ftp") {
                f.app = AppKind::Ftp;
                f.params = FtpParams{};
            } else if (e.value == "poisson") {
                f.app = AppKind::Poisson;
                f.params = PoissonParams{};
            } else {
                error(e.line, "'app' must be voip, video, ftp or poisson, got '" + e.value + "'");
            }
        }
        f.tos = default_tos(f.app);

        for (const auto &e : s.entries) {
            if (e.key == "app") {
                continue;
            }
            if (e.key == "src") {
                f.src = e.value;
            } else if (e.key == "dst") {
                f.dst = e.value;
            } else if (e.key == "count") {
                integer<std::uint32_t>(e, f.count, 1);
            } else if (e.key == "start") {
                non_negative(e, f.start);
            } else if (e.key == "stop") {
                double v = 0.0;
                if (positive(e, v)) {
                    f.stop = v;
                }
            } else if (e.key == "stagger") {
                non_negative(e, f.stagger);
            } else if (e.key == "tos") {
                int v = 0;
                if (integer<int>(e, v, 0)) {
                    f.tos = v;
                    if (f.app != AppKind::Poisson && v != default_tos(f.app)) {
                        error(e.line, "tos " + e.value + " does not match app " + std::string(name_of(f.app)) +
                                          " (expected " + std::to_string(default_tos(f.app)) + ")");
                    }
                }
            } else if (e.key == "mtu") {
                integer<std::uint32_t>(e, f.mtu_payload, 1);
            } else if (!read_app_param(f, e)) {
                unknown(s, e);
            }
        }
        return f;
    }

    bool read_app_param(FlowDecl &f, const Entry &e)
    {
        if (auto *v = std::get_if<VoipParams>(&f.params)) {
            if (e.key == "frame_interval") {
                return positive(e, v->frame_interval), true;
            }
            if (e.key == "frame_payload") {
                return integer<std::uint32_t>(e, v->frame_payload, 1), true;
            }
        } else if (auto *v = std::get_if<VideoParams>(&f.params)) {
            if (e.key == "frame_rate") {
                return positive(e, v->frame_rate), true;
            }
            if (e.key == "frame_size") {
                return integer<std::uint32_t>(e, v->frame_size, 1), true;
            }
        } else if (auto *v = std::get_if<FtpParams>(&f.params)) {
            if (e.key == "inter_request") {
                return positive(e, v->inter_request), true;
            }
            if (e.key == "file_size") {
                return integer<std::uint32_t>(e, v->file_size, 1), true;
            }
        } else if (auto *v = std::get_if<PoissonParams>(&f.params)) {
            if (e.key == "rate") {
                return positive(e, v->rate), true;
            }
            if (e.key == "mean_size") {
                return positive(e, v->mean_size), true;
            }
        }
        return false;
    }

    std::vector<Section> sections_;
    std::vector<Diagnostic> errors_;
};

} // namespace

std::vector<Diagnostic> validate(const ScenarioConfig &c)
{
    std::vector<Diagnostic> out;
    auto err = [&](int line, std::string msg) { out.push_back(Diagnostic{line, std::move(msg)}); };

    if (!(c.sim.duration > 0.0)) {
        err(0, "sim duration must be positive");
    }
    if (!(c.sim.window > 0.0)) {
        err(0, "sim window must be positive");
    }
    if (c.sim.warmup < 0.0 || (c.sim.duration > 0.0 && c.sim.warmup >= c.sim.duration)) {
        err(0, "sim warmup must lie in [0, duration)");
    }
    if (c.topology.step.steps == 0 || c.topology.step.nodes_per_step == 0) {
        err(0, "topology needs steps >= 1 and nodes_per_step >= 1");
    }
    if (!(c.topology.step.link.rate_bps > 0.0) || c.topology.step.link.propagation_delay < 0.0) {
        err(0, "topology link needs a positive rate and a non-negative delay");
    }
    try {
        c.qdisc.validate();
    } catch (const ConfigError &e) {
        err(0, e.what());
    }

    const std::uint64_t routers = std::uint64_t{c.topology.step.steps} * c.topology.step.nodes_per_step;
    std::set<std::string> hosts;
    for (const auto &h : c.hosts) {
        if (!hosts.insert(h.name).second) {
            err(h.line, "host '" + h.name + "' declared twice");
        }
        if ((h.link_rate && !(*h.link_rate > 0.0)) || (h.prop_delay && *h.prop_delay < 0.0)) {
            err(h.line, "host '" + h.name + "' access link needs a positive rate and a non-negative delay");
        }
        if (h.router >= routers) {
            err(h.line, "host '" + h.name + "' attaches to router " + std::to_string(h.router) + " but the backbone has " +
                            std::to_string(routers) + " routers");
        }
    }
    std::set<std::string> flows;
    for (const auto &f : c.flows) {
        if (!flows.insert(f.name).second) {
            err(f.line, "flow '" + f.name + "' declared twice");
        }
        for (const auto *end : {&f.src, &f.dst}) {
            if (!hosts.count(*end)) {
                err(f.line, "flow '" + f.name + "' references undeclared host '" + *end + "'");
            }
        }
        if (f.src == f.dst) {
            err(f.line, "flow '" + f.name + "' has the same source and destination");
        }
        if (f.count == 0) {
            err(f.line, "flow '" + f.name + "' count must be at least 1");
        }
        if (f.mtu_payload == 0) {
            err(f.line, "flow '" + f.name + "' mtu must be at least 1");
        }
        const SimTime stop = f.stop.value_or(c.sim.duration);
        if (f.start < 0.0 || !(stop > f.start)) {
            err(f.line, "flow '" + f.name + "' needs 0 <= start < stop");
        }
        if (f.app != AppKind::Poisson && f.tos != default_tos(f.app)) {
            err(f.line, "flow '" + f.name + "' tos " + std::to_string(f.tos) + " does not match its app");
        }
    }
    return out;
}

ParseResult parse_scenario(std::string_view text)
{
    return Parser(text).run();
}

ParseResult load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.errors.push_back(Diagnostic{0, "cannot read scenario file " + path.string()});
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string format_diagnostics(const std::vector<Diagnostic> &errors, std::string_view source)
{
    std::ostringstream os;
    for (const auto &d : errors) {
        if (!source.empty()) {
            os << source << ':';
        }
        if (d.line > 0) {
            os << d.line << ": ";
        } else if (!source.empty()) {
            os << ' ';
        }
        os << d.message << '\n';
    }
    return os.str();
}

} // namespace stepnet
