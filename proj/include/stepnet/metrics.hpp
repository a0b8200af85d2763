#pragma once

#include "stepnet/packet.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stepnet {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PacketFate : std::uint8_t { InFlight, Delivered, Dropped };

struct PacketRecord {
    FlowId flow = 0;
    TrafficClass cls = TrafficClass::BestEffort;
    std::uint32_t size = 0;
    SimTime created = 0.0;
    std::optional<SimTime> delivered;
    std::optional<NodeId> dropped_at;
    SimTime dropped_time = 0.0;

    PacketFate fate() const noexcept
    {
        if (delivered) {
            return PacketFate::Delivered;
        }
        return dropped_at ? PacketFate::Dropped : PacketFate::InFlight;
    }
};

/// Time spent in one router's qdisc.
struct HopSample {
    PacketId packet = 0;
    NodeId node = 0;
    SimTime enqueued = 0.0;
    SimTime dequeued = 0.0;
};

struct MetricOptions {
    SimTime duration = 0.0;
    double window = 1.0;
    SimTime warmup = 0.0;
    bool per_hop = false;
};

/// Per-packet outcome log for one run. Packet ids index the record vector.
class MetricStore {
public:
    explicit MetricStore(MetricOptions options = {});

    /// Registers a generated packet; its id must equal the current record count.
    void on_sent(const Packet &p);
    void on_delivered(PacketId id, SimTime now);
    void on_dropped(PacketId id, NodeId node, SimTime now);
    void on_dequeued(const Packet &p, NodeId node, SimTime now);

    const MetricOptions &options() const noexcept { return options_; }
    const std::vector<PacketRecord> &records() const noexcept { return records_; }
    const std::vector<HopSample> &hops() const noexcept { return hops_; }
    /// Statistics skip records created before the warmup cutoff.
    bool in_statistics(const PacketRecord &r) const noexcept { return r.created >= options_.warmup; }
    std::size_t window_count() const noexcept;
    std::size_t window_index(SimTime t) const noexcept;

private:
    PacketRecord &at(PacketId id);

    MetricOptions options_;
    std::vector<PacketRecord> records_;
    std::vector<HopSample> hops_;
};

/// Throws MetricError for a record that was never delivered.
double e2e_delay(const PacketRecord &r);

/// Population variance; empty below two samples.
std::optional<double> delay_variation(std::span<const double> delays);

/// Interarrival jitter estimator: J += (|D| - J) / 16 over successive delay
/// differences, in arrival order. Empty below two samples.
std::optional<double> jitter_rfc(std::span<const double> delays_in_arrival_order);

struct SeriesPoint {
    SimTime time = 0.0; // window start
    double value = 0.0;
};

struct ThroughputPoint {
    SimTime time = 0.0;
    double bytes_per_s = 0.0;
    double packets_per_s = 0.0;
};

/// Delivered bytes and packets per window, one point per window.
std::vector<ThroughputPoint> traffic_received(const MetricStore &m, TrafficClass c);

/// Windowed mean end-to-end delay, keyed by delivery time. Empty windows are skipped.
std::vector<SeriesPoint> e2e_delay_series(const MetricStore &m, TrafficClass c);

/// Windowed delay variance. Windows with fewer than two deliveries are skipped.
std::vector<SeriesPoint> delay_variation_series(const MetricStore &m, TrafficClass c);

struct DropReport {
    std::uint64_t total = 0;
    std::map<NodeId, std::uint64_t> per_node;
    std::vector<SeriesPoint> rate; // drops per second, one point per window
};

DropReport drops(const MetricStore &m, TrafficClass c);

/// Windowed mean qdisc waiting time at `node`, keyed by dequeue time.
/// Throws MetricError unless per-hop detail was recorded.
std::vector<SeriesPoint> queuing_delay(const MetricStore &m, NodeId node);
double mean_queuing_delay(const MetricStore &m, NodeId node);

struct ClassSummary {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0;
    double mean_delay = 0.0;
    double max_delay = 0.0;
    double delay_variance = 0.0;
    double jitter = 0.0;
    double throughput_bps = 0.0;
};

struct Summary {
    PerClass<ClassSummary> per_class{};
    ClassSummary total;
};

Summary summarize(const MetricStore &m);

} // namespace stepnet
