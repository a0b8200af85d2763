#include "stepnet/engine.hpp"

#include <utility>

namespace stepnet {

Simulation::Simulation(Topology topology, const QdiscConfig &qdisc, std::vector<FlowSpec> flows,
                       MetricOptions options, std::uint64_t seed, double processing_delay)
    : topology_(std::move(topology)), metrics_(options), processing_delay_(processing_delay)
{
    if (!topology_.has_routes()) {
        topology_.set_routes(compute_routes(topology_));
    }
    qdisc.validate();
    ports_.resize(topology_.node_count());
    for (const Node &n : topology_.nodes()) {
        if (n.kind == NodeKind::Host) {
            if (n.ports.size() != 1) {
                throw ConfigError("host " + n.name + " must have exactly one link");
            }
            continue;
        }
        for (std::size_t i = 0; i < n.ports.size(); ++i) {
            ports_[n.id].push_back(OutputPort{make_queue_disc(qdisc), false});
        }
    }
    generators_.reserve(flows.size());
    for (FlowSpec &f : flows) {
        if (f.src >= topology_.node_count() || topology_.node(f.src).kind != NodeKind::Host ||
            f.dst >= topology_.node_count() || topology_.node(f.dst).kind != NodeKind::Host || f.src == f.dst) {
            throw ConfigError("flow " + std::to_string(f.id) + " must connect two distinct hosts");
        }
        if (f.id != generators_.size()) {
            throw ConfigError("flow ids must be dense and ordered");
        }
        const SimTime start = f.start;
        const bool active = start < f.stop;
        generators_.emplace_back(std::move(f), seed);
        if (active) {
            calendar_.schedule(start, GenerateNext{static_cast<FlowId>(generators_.size() - 1)});
        }
    }
}

const QueueDisc &Simulation::port_qdisc(NodeId router, NodeId towards) const
{
    const std::size_t port = topology_.port_towards(router, towards);
    const auto &node_ports = ports_.at(router);
    if (node_ports.empty()) {
        throw ConfigError("node " + std::to_string(router) + " is not a router");
    }
    return *node_ports.at(port).qdisc;
}

RunSummary Simulation::run(SimTime until)
{
    RunSummary s;
    while (!ended_) {
        const auto t = calendar_.peek_time();
        if (!t || *t > until) {
            break;
        }
        auto ev = calendar_.next();
        if (trace_) {
            trace_(*ev);
        }
        dispatch(*ev);
        ++s.events_processed;
    }
    s.final_clock = calendar_.now();
    return s;
}

void Simulation::dispatch(Event<EventPayload> &ev)
{
    std::visit(
        [this](auto &payload) {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, PacketArrival>) {
                on_arrival(payload.node, std::move(payload.packet));
            } else if constexpr (std::is_same_v<T, TransmitComplete>) {
                on_transmit_complete(payload.node, payload.port);
            } else if constexpr (std::is_same_v<T, GenerateNext>) {
                on_generate(payload.flow);
            } else {
                ended_ = true;
            }
        },
        ev.payload);
}

void Simulation::on_generate(FlowId flow)
{
    const SimTime now = calendar_.now();
    FlowGenerator &gen = generators_.at(flow);
    Emission e = gen.generate(now);
    for (Packet &p : e.packets) {
        p.id = next_packet_id_++;
        p.cls = classifier_(p.tos);
        metrics_.on_sent(p);
        // hosts do not queue: the access link's busy_until serializes the burst
        send_on_link(p.src, 0, std::move(p));
    }
    if (e.next < gen.spec().stop) {
        calendar_.schedule(e.next, GenerateNext{flow});
    }
}

void Simulation::send_on_link(NodeId from, std::size_t port, Packet p)
{
    const Port &out = topology_.node(from).ports.at(port);
    Link &link = topology_.links()[out.link];
    const LinkTiming t = link_transmit(link, link.direction_from(from), p.size, calendar_.now());
    ++p.hops;
    SimTime arrive = t.arrive;
    if (topology_.node(out.peer).kind == NodeKind::Router) {
        arrive += processing_delay_;
    }
    if (!ports_[from].empty()) {
        calendar_.schedule(t.depart, TransmitComplete{from, port});
    }
    calendar_.schedule(arrive, PacketArrival{out.peer, std::move(p)});
}

void Simulation::on_arrival(NodeId node, Packet p)
{
    const SimTime now = calendar_.now();
    if (topology_.node(node).kind == NodeKind::Host) {
        sink_receive(metrics_, p, node, now);
        return;
    }
    const NodeId hop = topology_.routes().next_hop(node, p.dst);
    const std::size_t port = topology_.port_towards(node, hop);
    OutputPort &out = ports_[node][port];
    const PacketId id = p.id;
    if (out.qdisc->enqueue(p, now) == Verdict::Dropped) {
        metrics_.on_dropped(id, node, now);
        return;
    }
    if (!out.busy) {
        start_transmission(node, port);
    }
}

void Simulation::on_transmit_complete(NodeId node, std::size_t port)
{
    ports_[node][port].busy = false;
    start_transmission(node, port);
}

void Simulation::start_transmission(NodeId router, std::size_t port)
{
    OutputPort &out = ports_[router][port];
    std::optional<Packet> p = out.qdisc->dequeue(calendar_.now());
    if (!p) {
        return;
    }
    metrics_.on_dequeued(*p, router, calendar_.now());
    out.busy = true;
    send_on_link(router, port, std::move(*p));
}

ScenarioPlan plan_scenario(const ScenarioConfig &config)
{
    if (auto errors = validate(config); !errors.empty()) {
        throw ConfigError("invalid scenario:\n" + format_diagnostics(errors));
    }
    ScenarioPlan plan;
    plan.topology = build_step_topology(config.topology.step);
    for (const HostDecl &h : config.hosts) {
        plan.hosts[h.name] = attach_host(plan.topology, h.router, h.access_link(config.topology), h.name);
    }
    FlowId next_id = 0;
    for (const FlowDecl &d : config.flows) {
        for (std::uint32_t i = 0; i < d.count; ++i) {
            FlowSpec f;
            f.id = next_id++;
            f.app = d.app;
            f.src = plan.hosts.at(d.src);
            f.dst = plan.hosts.at(d.dst);
            f.tos = d.tos;
            f.start = d.start + i * d.stagger;
            f.stop = d.stop.value_or(config.sim.duration);
            f.mtu_payload = d.mtu_payload;
            f.params = d.params;
            plan.flows.push_back(std::move(f));
        }
    }
    return plan;
}

RunResult run_scenario(const ScenarioConfig &config, std::optional<std::uint64_t> seed_override)
{
    ScenarioPlan plan = plan_scenario(config);
    MetricOptions opts;
    opts.duration = config.sim.duration;
    opts.window = config.sim.window;
    opts.warmup = config.sim.warmup;
    opts.per_hop = config.sim.per_hop;

    Simulation sim(std::move(plan.topology), config.qdisc, std::move(plan.flows), opts,
                   seed_override.value_or(config.sim.seed), config.topology.processing_delay);
    RunResult r{config, {}, MetricStore(opts), {}, 0};
    r.summary = sim.run(config.sim.duration);
    r.config.sim.seed = seed_override.value_or(config.sim.seed);
    r.topology = sim.topology();
    r.metrics = std::move(sim.metrics());
    r.unmapped_tos = sim.unmapped_tos();
    return r;
}

} // namespace stepnet
