#include "stepnet/qdisc.hpp"

#include "stepnet/topology.hpp"

#include <string>

namespace stepnet {

std::string_view name_of(QdiscKind k) noexcept
{
    switch (k) {
    case QdiscKind::Fifo: return "fifo";
    case QdiscKind::Priority: return "pq";
    case QdiscKind::WeightedRoundRobin: return "wfq";
    }
    return "unknown";
}

std::optional<QdiscKind> parse_qdisc_kind(std::string_view text) noexcept
{
    if (text == "fifo") {
        return QdiscKind::Fifo;
    }
    if (text == "pq") {
        return QdiscKind::Priority;
    }
    if (text == "wfq") {
        return QdiscKind::WeightedRoundRobin;
    }
    return std::nullopt;
}

void QdiscConfig::validate() const
{
    if (fifo_capacity == 0 || wfq_capacity == 0) {
        throw ConfigError("queue capacity must be at least 1 packet");
    }
    for (TrafficClass c : kAllClasses) {
        if (pq_capacity[index_of(c)] == 0) {
            throw ConfigError("pq capacity for " + std::string(name_of(c)) + " must be at least 1");
        }
        if (wfq_weights[index_of(c)] == 0) {
            throw ConfigError("wfq weight for " + std::string(name_of(c)) + " must be at least 1");
        }
    }
}

// FIFO

FifoQueueDisc::FifoQueueDisc(std::size_t capacity) : capacity_(capacity) {}

Verdict FifoQueueDisc::enqueue(const Packet &p, SimTime now)
{
    if (queue_.size() >= capacity_) {
        return drop(p.cls);
    }
    queue_.push_back(p);
    queue_.back().enqueued_at = now;
    ++count_[index_of(p.cls)];
    return Verdict::Accepted;
}

std::optional<Packet> FifoQueueDisc::dequeue(SimTime)
{
    if (queue_.empty()) {
        return std::nullopt;
    }
    Packet p = queue_.front();
    queue_.pop_front();
    --count_[index_of(p.cls)];
    return p;
}

Backlog FifoQueueDisc::backlog() const
{
    return Backlog{count_, queue_.size()};
}

// PQ

PriorityQueueDisc::PriorityQueueDisc(PerClass<std::size_t> capacity) : capacity_(capacity) {}

Verdict PriorityQueueDisc::enqueue(const Packet &p, SimTime now)
{
    auto &q = queues_[index_of(p.cls)];
    if (q.size() >= capacity_[index_of(p.cls)]) {
        return drop(p.cls);
    }
    q.push_back(p);
    q.back().enqueued_at = now;
    return Verdict::Accepted;
}

std::optional<Packet> PriorityQueueDisc::dequeue(SimTime)
{
    for (auto &q : queues_) {
        if (!q.empty()) {
            Packet p = q.front();
            q.pop_front();
            return p;
        }
    }
    return std::nullopt;
}

Backlog PriorityQueueDisc::backlog() const
{
    Backlog b;
    for (std::size_t i = 0; i < kClassCount; ++i) {
        b.per_class[i] = queues_[i].size();
        b.total += queues_[i].size();
    }
    return b;
}

// WFQ (weighted round robin by packet count)

WeightedRoundRobinQueueDisc::WeightedRoundRobinQueueDisc(std::size_t shared_capacity,
                                                         PerClass<std::uint32_t> weights)
    : capacity_(shared_capacity), weights_(weights)
{
    reset_round();
}

void WeightedRoundRobinQueueDisc::reset_round() noexcept
{
    cursor_ = 0;
    credit_ = weights_[0];
}

void WeightedRoundRobinQueueDisc::advance() noexcept
{
    cursor_ = (cursor_ + 1) % kClassCount;
    credit_ = weights_[cursor_];
}

Verdict WeightedRoundRobinQueueDisc::enqueue(const Packet &p, SimTime now)
{
    if (total_ >= capacity_) {
        return drop(p.cls);
    }
    auto &q = queues_[index_of(p.cls)];
    q.push_back(p);
    q.back().enqueued_at = now;
    ++total_;
    return Verdict::Accepted;
}

std::optional<Packet> WeightedRoundRobinQueueDisc::dequeue(SimTime)
{
    if (total_ == 0) {
        reset_round();
        return std::nullopt;
    }
    // At least one queue is non-empty, so this finds one within a full cycle.
    while (queues_[cursor_].empty() || credit_ == 0) {
        advance();
    }
    auto &q = queues_[cursor_];
    Packet p = q.front();
    q.pop_front();
    --total_;
    --credit_;
    return p;
}

Backlog WeightedRoundRobinQueueDisc::backlog() const
{
    Backlog b;
    for (std::size_t i = 0; i < kClassCount; ++i) {
        b.per_class[i] = queues_[i].size();
    }
    b.total = total_;
    return b;
}

std::unique_ptr<QueueDisc> make_queue_disc(const QdiscConfig &config)
{
    config.validate();
    switch (config.kind) {
    case QdiscKind::Fifo: return std::make_unique<FifoQueueDisc>(config.fifo_capacity);
    case QdiscKind::Priority: return std::make_unique<PriorityQueueDisc>(config.pq_capacity);
    case QdiscKind::WeightedRoundRobin:
        return std::make_unique<WeightedRoundRobinQueueDisc>(config.wfq_capacity, config.wfq_weights);
    }
    throw ConfigError("unknown qdisc kind");
}

}
