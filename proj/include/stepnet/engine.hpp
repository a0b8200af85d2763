#pragma once

#include "stepnet/metrics.hpp"
#include "stepnet/qdisc.hpp"
#include "stepnet/scenario.hpp"
#include "stepnet/sim_kernel.hpp"
#include "stepnet/topology.hpp"
#include "stepnet/traffic.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stepnet {

/// A packet reaches `node` (fully received).
struct PacketArrival {
    NodeId node = 0;
    Packet packet;
};

/// Output port `port` of router `node` finished serializing.
struct TransmitComplete {
    NodeId node = 0;
    std::size_t port = 0;
};

struct GenerateNext {
    FlowId flow = 0;
};

struct SimEnd {};

using EventPayload = std::variant<PacketArrival, TransmitComplete, GenerateNext, SimEnd>;

/// Packet-level network: hosts emit straight onto their access link, routers
/// queue in one qdisc per output port and serialize non-preemptively.
class Simulation {
public:
    Simulation(Topology topology, const QdiscConfig &qdisc, std::vector<FlowSpec> flows, MetricOptions options,
               std::uint64_t seed, double processing_delay = 0.0);

    /// Processes events until the calendar is empty or the next event lies
    /// beyond `until`. May be called again to continue.
    RunSummary run(SimTime until);

    /// Schedules a SimEnd event; run() stops once it is delivered.
    void stop_at(SimTime t) { calendar_.schedule(t, SimEnd{}); }

    const MetricStore &metrics() const noexcept { return metrics_; }
    MetricStore &metrics() noexcept { return metrics_; }
    const Topology &topology() const noexcept { return topology_; }
    const QueueDisc &port_qdisc(NodeId router, NodeId towards) const;
    std::uint64_t unmapped_tos() const noexcept { return classifier_.unmapped; }
    SimTime now() const noexcept { return calendar_.now(); }

    /// Called for every event just before it is dispatched.
    void set_trace(std::function<void(const Event<EventPayload> &)> trace) { trace_ = std::move(trace); }

private:
    struct OutputPort {
        std::unique_ptr<QueueDisc> qdisc;
        bool busy = false;
    };

    void dispatch(Event<EventPayload> &ev);
    void on_generate(FlowId flow);
    void on_arrival(NodeId node, Packet p);
    void on_transmit_complete(NodeId node, std::size_t port);
    void start_transmission(NodeId router, std::size_t port);
    void send_on_link(NodeId from, std::size_t port, Packet p);

    Topology topology_;
    std::vector<FlowGenerator> generators_;
    std::vector<std::vector<OutputPort>> ports_; // [node][port]; empty for hosts
    EventCalendar<EventPayload> calendar_;
    MetricStore metrics_;
    TosClassifier classifier_;
    double processing_delay_;
    PacketId next_packet_id_ = 0;
    bool ended_ = false;
    std::function<void(const Event<EventPayload> &)> trace_;
};

/// Named hosts and expanded flows for a config.
struct ScenarioPlan {
    Topology topology;
    std::map<std::string, NodeId> hosts;
    std::vector<FlowSpec> flows;
};

ScenarioPlan plan_scenario(const ScenarioConfig &config);

struct RunResult {
    ScenarioConfig config;
    Topology topology;
    MetricStore metrics;
    RunSummary summary;
    std::uint64_t unmapped_tos = 0;
};

/// Builds and runs a validated config to its duration. Throws ConfigError if
/// the config does not validate.
RunResult run_scenario(const ScenarioConfig &config, std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace stepnet
