#pragma once

#include "stepnet/packet.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stepnet {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RoutingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using LinkId = std::uint32_t;

enum class NodeKind : std::uint8_t { Host, Router };

struct LinkProfile {
    double rate_bps = 10e6;
    double propagation_delay = 5e-6;
};

/// Position of a backbone router inside the staircase.
struct StepPosition {
    std::uint32_t step = 0;
    std::uint32_t offset = 0;
};

struct Port {
    LinkId link = 0;
    NodeId peer = kNoNode;
};

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Router;
    std::string name;
    std::optional<StepPosition> position;
    std::vector<Port> ports;
};

/// 0 is a->b, 1 is b->a.
enum class Direction : std::uint8_t { Forward = 0, Reverse = 1 };

struct Link {
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    LinkProfile profile;
    std::array<SimTime, 2> busy_until{0.0, 0.0};

    Direction direction_from(NodeId from) const;
    NodeId far_end(NodeId from) const { return from == a ? b : a; }
};

struct LinkTiming {
    SimTime depart = 0.0; // last bit leaves the sender
    SimTime arrive = 0.0; // last bit reaches the receiver
};

inline double transmission_time(double size_bits, double rate_bps) { return size_bits / rate_bps; }

/// Non-preemptive serialization on one link direction. Updates busy_until.
LinkTiming link_transmit(Link &link, Direction dir, std::uint32_t size_bytes, SimTime now);

/// next_hop(src, dst) for every pair; next_hop(n, n) is kNoNode.
class RoutingTable {
public:
    RoutingTable() = default;
    RoutingTable(std::size_t node_count, std::vector<NodeId> next_hops)
        : n_(node_count), next_(std::move(next_hops))
    {
    }

    NodeId next_hop(NodeId src, NodeId dst) const { return next_.at(std::size_t{src} * n_ + dst); }
    std::size_t node_count() const noexcept { return n_; }

    /// Node sequence from src to dst inclusive; empty when src == dst.
    std::vector<NodeId> path(NodeId src, NodeId dst) const;

private:
    std::size_t n_ = 0;
    std::vector<NodeId> next_;
};

class Topology {
public:
    NodeId add_node(NodeKind kind, std::string name = {});
    LinkId connect(NodeId a, NodeId b, LinkProfile profile);

    const std::vector<Node> &nodes() const noexcept { return nodes_; }
    const std::vector<Link> &links() const noexcept { return links_; }
    std::vector<Link> &links() noexcept { return links_; }
    const Node &node(NodeId id) const { return nodes_.at(id); }
    Node &node(NodeId id) { return nodes_.at(id); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }
    std::size_t degree(NodeId id) const { return nodes_.at(id).ports.size(); }

    /// Port index on `from` whose link leads to neighbour `to`.
    std::size_t port_towards(NodeId from, NodeId to) const;

    void set_routes(RoutingTable routes) { routes_ = std::move(routes); }
    bool has_routes() const noexcept { return routes_.has_value(); }
    const RoutingTable &routes() const;

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::optional<RoutingTable> routes_;
};

struct StepParams {
    std::uint32_t steps = 1;
    std::uint32_t nodes_per_step = 1;
    LinkProfile link;
};

/// Staircase backbone: each step is a horizontal run of nodes_per_step
/// routers, and the last router of step i is joined to the first of step i+1.
/// Router ids are dense: step * nodes_per_step + offset.
Topology build_step_topology(const StepParams &params);

/// Appends a host connected to `router` and recomputes routes.
NodeId attach_host(Topology &topo, NodeId router, LinkProfile profile, std::string name = {});

/// Minimum-hop next hops, ties broken by the lowest next-hop id.
RoutingTable compute_routes(const Topology &topo);

} // namespace stepnet
