#include "stepnet/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

namespace stepnet {

Direction Link::direction_from(NodeId from) const
{
    if (from == a) {
        return Direction::Forward;
    }
    if (from == b) {
        return Direction::Reverse;
    }
    throw std::out_of_range("node " + std::to_string(from) + " is not an endpoint of this link");
}

LinkTiming link_transmit(Link &link, Direction dir, std::uint32_t size_bytes, SimTime now)
{
    SimTime &busy = link.busy_until[static_cast<std::size_t>(dir)];
    const SimTime start = std::max(now, busy);
    LinkTiming t;
    t.depart = start + transmission_time(8.0 * size_bytes, link.profile.rate_bps);
    t.arrive = t.depart + link.profile.propagation_delay;
    busy = t.depart;
    return t;
}

std::vector<NodeId> RoutingTable::path(NodeId src, NodeId dst) const
{
    std::vector<NodeId> out;
    if (src == dst) {
        return out;
    }
    out.push_back(src);
    NodeId cur = src;
    while (cur != dst) {
        cur = next_hop(cur, dst);
        if (cur == kNoNode || out.size() > n_) {
            throw RoutingError("routing loop or hole between " + std::to_string(src) + " and " +
                               std::to_string(dst));
        }
        out.push_back(cur);
    }
    return out;
}

NodeId Topology::add_node(NodeKind kind, std::string name)
{
    const auto id = static_cast<NodeId>(nodes_.size());
    Node n;
    n.id = id;
    n.kind = kind;
    n.name = name.empty() ? (kind == NodeKind::Router ? "router" : "host") + std::to_string(id)
                          : std::move(name);
    nodes_.push_back(std::move(n));
    routes_.reset();
    return id;
}

LinkId Topology::connect(NodeId a, NodeId b, LinkProfile profile)
{
    if (a >= nodes_.size() || b >= nodes_.size()) {
        throw ConfigError("cannot link unknown node");
    }
    if (a == b) {
        throw ConfigError("self-loop on node " + std::to_string(a));
    }
    if (!(profile.rate_bps > 0.0)) {
        throw ConfigError("link rate must be positive");
    }
    if (!(profile.propagation_delay >= 0.0)) {
        throw ConfigError("propagation delay must be non-negative");
    }
    const auto id = static_cast<LinkId>(links_.size());
    links_.push_back(Link{a, b, profile, {0.0, 0.0}});
    nodes_[a].ports.push_back(Port{id, b});
    nodes_[b].ports.push_back(Port{id, a});
    routes_.reset();
    return id;
}

std::size_t Topology::port_towards(NodeId from, NodeId to) const
{
    const auto &ports = nodes_.at(from).ports;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        if (ports[i].peer == to) {
            return i;
        }
    }
    throw RoutingError("node " + std::to_string(from) + " has no link to " + std::to_string(to));
}

const RoutingTable &Topology::routes() const
{
    if (!routes_) {
        throw RoutingError("routes not computed");
    }
    return *routes_;
}

Topology build_step_topology(const StepParams &params)
{
    if (params.steps == 0) {
        throw ConfigError("step topology needs at least one step");
    }
    if (params.nodes_per_step == 0) {
        throw ConfigError("step topology needs at least one node per step");
    }
    Topology topo;
    for (std::uint32_t s = 0; s < params.steps; ++s) {
        for (std::uint32_t k = 0; k < params.nodes_per_step; ++k) {
            const NodeId id = topo.add_node(NodeKind::Router);
            topo.node(id).position = StepPosition{s, k};
            if (id > 0) {
                // horizontal run inside a step, or the riser from the previous step
                topo.connect(id - 1, id, params.link);
            }
        }
    }
    topo.set_routes(compute_routes(topo));
    return topo;
}

NodeId attach_host(Topology &topo, NodeId router, LinkProfile profile, std::string name)
{
    if (router >= topo.node_count()) {
        throw ConfigError("cannot attach host: node " + std::to_string(router) + " does not exist");
    }
    if (topo.node(router).kind != NodeKind::Router) {
        throw ConfigError("cannot attach host: node " + std::to_string(router) + " is a host");
    }
    const NodeId host = topo.add_node(NodeKind::Host, std::move(name));
    topo.connect(host, router, profile);
    topo.set_routes(compute_routes(topo));
    return host;
}

RoutingTable compute_routes(const Topology &topo)
{
    const std::size_t n = topo.node_count();
    constexpr auto kUnreached = std::numeric_limits<std::uint32_t>::max();

    // dist[d * n + v]: hop distance from v to d
    std::vector<std::uint32_t> dist(n * n, kUnreached);
    for (NodeId d = 0; d < n; ++d) {
        auto *row = &dist[std::size_t{d} * n];
        std::deque<NodeId> frontier{d};
        row[d] = 0;
        while (!frontier.empty()) {
            const NodeId u = frontier.front();
            frontier.pop_front();
            for (const Port &p : topo.node(u).ports) {
                if (row[p.peer] == kUnreached) {
                    row[p.peer] = row[u] + 1;
                    frontier.push_back(p.peer);
                }
            }
        }
        for (NodeId v = 0; v < n; ++v) {
            if (row[v] == kUnreached) {
                std::ostringstream os;
                os << "topology is disconnected: no path from " << topo.node(v).name << " (" << v
                   << ") to " << topo.node(d).name << " (" << d << ")";
                throw RoutingError(os.str());
            }
        }
    }

    std::vector<NodeId> next(n * n, kNoNode);
    for (NodeId d = 0; d < n; ++d) {
        const auto *row = &dist[std::size_t{d} * n];
        for (NodeId v = 0; v < n; ++v) {
            if (v == d) {
                continue;
            }
            NodeId best = kNoNode;
            for (const Port &p : topo.node(v).ports) {
                if (row[p.peer] + 1 == row[v] && p.peer < best) {
                    best = p.peer;
                }
            }
            next[std::size_t{v} * n + d] = best;
        }
    }
    return RoutingTable(n, std::move(next));
}

} // namespace stepnet
