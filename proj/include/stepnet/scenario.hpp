#pragma once

#include "stepnet/qdisc.hpp"
#include "stepnet/topology.hpp"
#include "stepnet/traffic.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stepnet {

struct SimSection {
    SimTime duration = 0.0;
    std::uint64_t seed = 1;
    double window = 1.0;
    SimTime warmup = 0.0;
    bool per_hop = false;
};

struct TopologySection {
    StepParams step;
    double processing_delay = 0.0;
};

struct HostDecl {
    std::string name;
    NodeId router = 0;
    std::optional<double> link_rate;  // falls back to the backbone link profile
    std::optional<double> prop_delay;
    int line = 0;

    LinkProfile access_link(const TopologySection &t) const
    {
        return LinkProfile{link_rate.value_or(t.step.link.rate_bps),
                           prop_delay.value_or(t.step.link.propagation_delay)};
    }
};

/// One [flow] section; `count` replicas are expanded at run time, replica i
/// starting at start + i * stagger.
struct FlowDecl {
    std::string name;
    AppKind app = AppKind::Voip;
    std::string src;
    std::string dst;
    std::uint32_t count = 1;
    SimTime start = 0.0;
    std::optional<SimTime> stop; // defaults to the run duration
    double stagger = 0.0;
    int tos = 6;
    std::uint32_t mtu_payload = 1500;
    AppParams params = VoipParams{};
    int line = 0;
};

struct ScenarioConfig {
    SimSection sim;
    TopologySection topology;
    QdiscConfig qdisc;
    std::vector<HostDecl> hosts;
    std::vector<FlowDecl> flows;
};

struct Diagnostic {
    int line = 0; // 0 when the problem is not tied to one line
    std::string message;
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<Diagnostic> errors;

    bool ok() const noexcept { return config.has_value(); }
};

/// Parses the sectioned key = value scenario format and validates it. All
/// problems found are reported, not only the first.
ParseResult parse_scenario(std::string_view text);
ParseResult load_scenario(const std::filesystem::path &path);

/// Re-checks a config built or modified in code. Same rules as the parser.
std::vector<Diagnostic> validate(const ScenarioConfig &config);

std::string format_diagnostics(const std::vector<Diagnostic> &errors, std::string_view source = {});

} // namespace stepnet
