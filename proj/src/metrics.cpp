#include "stepnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace stepnet {

MetricStore::MetricStore(MetricOptions options) : options_(options)
{
    if (!(options_.window > 0.0)) {
        throw MetricError("reporting window must be positive");
    }
}

std::size_t MetricStore::window_count() const noexcept
{
    if (options_.duration <= 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::ceil(options_.duration / options_.window - 1e-9));
}

std::size_t MetricStore::window_index(SimTime t) const noexcept
{
    const std::size_t n = window_count();
    const auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / options_.window)));
    return n == 0 ? 0 : std::min(i, n - 1);
}

PacketRecord &MetricStore::at(PacketId id)
{
    if (id >= records_.size()) {
        throw MetricError("unknown packet id " + std::to_string(id));
    }
    return records_[id];
}

void MetricStore::on_sent(const Packet &p)
{
    if (p.id != records_.size()) {
        throw MetricError("packet ids must be dense; got " + std::to_string(p.id));
    }
    PacketRecord r;
    r.flow = p.flow;
    r.cls = p.cls;
    r.size = p.size;
    r.created = p.created;
    records_.push_back(r);
}

void MetricStore::on_delivered(PacketId id, SimTime now)
{
    auto &r = at(id);
    if (r.fate() != PacketFate::InFlight) {
        throw MetricError("packet " + std::to_string(id) + " finished twice");
    }
    r.delivered = now;
}

void MetricStore::on_dropped(PacketId id, NodeId node, SimTime now)
{
    auto &r = at(id);
    if (r.fate() != PacketFate::InFlight) {
        throw MetricError("packet " + std::to_string(id) + " finished twice");
    }
    r.dropped_at = node;
    r.dropped_time = now;
}

void MetricStore::on_dequeued(const Packet &p, NodeId node, SimTime now)
{
    if (options_.per_hop) {
        hops_.push_back(HopSample{p.id, node, p.enqueued_at, now});
    }
}

double e2e_delay(const PacketRecord &r)
{
    if (!r.delivered) {
        throw MetricError("end-to-end delay requested for an undelivered packet");
    }
    return *r.delivered - r.created;
}

std::optional<double> delay_variation(std::span<const double> delays)
{
    if (delays.size() < 2) {
        return std::nullopt;
    }
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double d : delays) {
        ++n;
        const double delta = d - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (d - mean);
    }
    return m2 / static_cast<double>(n);
}

std::optional<double> jitter_rfc(std::span<const double> delays)
{
    if (delays.size() < 2) {
        return std::nullopt;
    }
    double j = 0.0;
    for (std::size_t i = 1; i < delays.size(); ++i) {
        j += (std::abs(delays[i] - delays[i - 1]) - j) / 16.0;
    }
    return j;
}

namespace {

struct Delivery {
    SimTime at;
    PacketId id;
    double delay;
};

// Deliveries of class c that enter statistics, in arrival order.
std::vector<Delivery> deliveries(const MetricStore &m, std::optional<TrafficClass> c)
{
    std::vector<Delivery> out;
    const auto &recs = m.records();
    for (PacketId id = 0; id < recs.size(); ++id) {
        const auto &r = recs[id];
        if (!r.delivered || !m.in_statistics(r) || (c && r.cls != *c)) {
            continue;
        }
        out.push_back(Delivery{*r.delivered, id, *r.delivered - r.created});
    }
    std::stable_sort(out.begin(), out.end(), [](const Delivery &a, const Delivery &b) { return a.at < b.at; });
    return out;
}

std::vector<std::vector<double>> delays_by_window(const MetricStore &m, TrafficClass c)
{
    std::vector<std::vector<double>> w(m.window_count());
    if (w.empty()) {
        return w;
    }
    for (const auto &d : deliveries(m, c)) {
        w[m.window_index(d.at)].push_back(d.delay);
    }
    return w;
}

SimTime window_start(const MetricStore &m, std::size_t i)
{
    return static_cast<double>(i) * m.options().window;
}

} // namespace

std::vector<ThroughputPoint> traffic_received(const MetricStore &m, TrafficClass c)
{
    const std::size_t n = m.window_count();
    std::vector<double> bytes(n, 0.0);
    std::vector<double> packets(n, 0.0);
    if (n > 0) {
        for (const auto &r : m.records()) {
            if (r.cls == c && r.delivered && m.in_statistics(r)) {
                const auto i = m.window_index(*r.delivered);
                bytes[i] += r.size;
                packets[i] += 1.0;
            }
        }
    }
    std::vector<ThroughputPoint> out(n);
    const double w = m.options().window;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = ThroughputPoint{window_start(m, i), bytes[i] / w, packets[i] / w};
    }
    return out;
}

std::vector<SeriesPoint> e2e_delay_series(const MetricStore &m, TrafficClass c)
{
    std::vector<SeriesPoint> out;
    const auto w = delays_by_window(m, c);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i].empty()) {
            continue;
        }
        const double sum = std::accumulate(w[i].begin(), w[i].end(), 0.0);
        out.push_back(SeriesPoint{window_start(m, i), sum / static_cast<double>(w[i].size())});
    }
    return out;
}

std::vector<SeriesPoint> delay_variation_series(const MetricStore &m, TrafficClass c)
{
    std::vector<SeriesPoint> out;
    const auto w = delays_by_window(m, c);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (auto v = delay_variation(w[i])) {
            out.push_back(SeriesPoint{window_start(m, i), *v});
        }
    }
    return out;
}

DropReport drops(const MetricStore &m, TrafficClass c)
{
    DropReport rep;
    std::vector<double> per_window(m.window_count(), 0.0);
    for (const auto &r : m.records()) {
        if (r.cls != c || !r.dropped_at) {
            continue;
        }
        ++rep.total;
        ++rep.per_node[*r.dropped_at];
        if (!per_window.empty() && m.in_statistics(r)) {
            per_window[m.window_index(r.dropped_time)] += 1.0;
        }
    }
    for (std::size_t i = 0; i < per_window.size(); ++i) {
        rep.rate.push_back(SeriesPoint{window_start(m, i), per_window[i] / m.options().window});
    }
    return rep;
}

std::vector<SeriesPoint> queuing_delay(const MetricStore &m, NodeId node)
{
    if (!m.options().per_hop) {
        throw MetricError("queuing delay needs per-hop detail (run with --detail per-hop)");
    }
    const std::size_t n = m.window_count();
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (const auto &h : m.hops()) {
        if (h.node != node || n == 0 || !m.in_statistics(m.records()[h.packet])) {
            continue;
        }
        const auto i = m.window_index(h.dequeued);
        sum[i] += h.dequeued - h.enqueued;
        ++count[i];
    }
    std::vector<SeriesPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        // idle windows report zero waiting
        out.push_back(SeriesPoint{window_start(m, i), count[i] ? sum[i] / static_cast<double>(count[i]) : 0.0});
    }
    return out;
}

double mean_queuing_delay(const MetricStore &m, NodeId node)
{
    if (!m.options().per_hop) {
        throw MetricError("queuing delay needs per-hop detail (run with --detail per-hop)");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto &h : m.hops()) {
        if (h.node == node && m.in_statistics(m.records()[h.packet])) {
            sum += h.dequeued - h.enqueued;
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

namespace {

void fill_delay_stats(ClassSummary &s, const std::vector<Delivery> &ds, std::uint64_t bytes, double span)
{
    std::vector<double> delays;
    delays.reserve(ds.size());
    for (const auto &d : ds) {
        delays.push_back(d.delay);
    }
    if (!delays.empty()) {
        s.mean_delay = std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
        s.max_delay = *std::max_element(delays.begin(), delays.end());
    }
    s.delay_variance = delay_variation(delays).value_or(0.0);
    s.jitter = jitter_rfc(delays).value_or(0.0);
    s.throughput_bps = span > 0.0 ? static_cast<double>(bytes) * 8.0 / span : 0.0;
}

} // namespace

Summary summarize(const MetricStore &m)
{
    Summary out;
    PerClass<std::uint64_t> bytes{};
    std::uint64_t total_bytes = 0;
    for (const auto &r : m.records()) {
        auto &s = out.per_class[index_of(r.cls)];
        ++s.sent;
        switch (r.fate()) {
        case PacketFate::Delivered:
            ++s.delivered;
            if (m.in_statistics(r)) {
                bytes[index_of(r.cls)] += r.size;
                total_bytes += r.size;
            }
            break;
        case PacketFate::Dropped: ++s.dropped; break;
        case PacketFate::InFlight: ++s.in_flight; break;
        }
    }
    const double span = m.options().duration - m.options().warmup;
    for (TrafficClass c : kAllClasses) {
        auto &s = out.per_class[index_of(c)];
        fill_delay_stats(s, deliveries(m, c), bytes[index_of(c)], span);
        out.total.sent += s.sent;
        out.total.delivered += s.delivered;
        out.total.dropped += s.dropped;
        out.total.in_flight += s.in_flight;
    }
    fill_delay_stats(out.total, deliveries(m, std::nullopt), total_bytes, span);
    return out;
}

} // namespace stepnet
