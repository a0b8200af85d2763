#pragma once

#include "stepnet/packet.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>

namespace stepnet {

enum class QdiscKind : std::uint8_t { Fifo, Priority, WeightedRoundRobin };

std::string_view name_of(QdiscKind k) noexcept;
std::optional<QdiscKind> parse_qdisc_kind(std::string_view text) noexcept;

struct QdiscConfig {
    QdiscKind kind = QdiscKind::Fifo;
    std::size_t fifo_capacity = 500;
    PerClass<std::size_t> pq_capacity{500, 500, 500};
    std::size_t wfq_capacity = 500;
    // BestEffort weight is not given by the source study; 10 keeps FTP alive.
    PerClass<std::uint32_t> wfq_weights{60, 40, 10};

    /// Throws ConfigError on a zero capacity or weight.
    void validate() const;
};

enum class Verdict : std::uint8_t { Accepted, Dropped };

struct Backlog {
    PerClass<std::size_t> per_class{};
    std::size_t total = 0;
};

/// Output-port scheduler. Packets must already carry their class.
class QueueDisc {
public:
    virtual ~QueueDisc() = default;

    virtual Verdict enqueue(const Packet &p, SimTime now) = 0;
    virtual std::optional<Packet> dequeue(SimTime now) = 0;
    virtual Backlog backlog() const = 0;
    virtual QdiscKind kind() const noexcept = 0;

    const PerClass<std::uint64_t> &drops() const noexcept { return drops_; }

protected:
    Verdict drop(TrafficClass c) noexcept
    {
        ++drops_[index_of(c)];
        return Verdict::Dropped;
    }

private:
    PerClass<std::uint64_t> drops_{};
};

/// Single drop-tail queue shared by every class.
class FifoQueueDisc final : public QueueDisc {
public:
    explicit FifoQueueDisc(std::size_t capacity);

    Verdict enqueue(const Packet &p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    Backlog backlog() const override;
    QdiscKind kind() const noexcept override { return QdiscKind::Fifo; }

private:
    std::size_t capacity_;
    std::deque<Packet> queue_;
    PerClass<std::size_t> count_{};
};

/// Strict priority over one drop-tail buffer per class. Lower classes starve
/// while a higher one stays backlogged.
class PriorityQueueDisc final : public QueueDisc {
public:
    explicit PriorityQueueDisc(PerClass<std::size_t> capacity);

    Verdict enqueue(const Packet &p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    Backlog backlog() const override;
    QdiscKind kind() const noexcept override { return QdiscKind::Priority; }

private:
    PerClass<std::size_t> capacity_;
    PerClass<std::deque<Packet>> queues_;
};

/// Packet-count weighted round robin over per-class queues that share one
/// buffer. The cursor visits Voice, Video, BestEffort in turn; a class gets up
/// to weight packets per visit. A visit ends when a dequeue finds the class's
/// queue empty or its credit spent. Unused credit is forfeited, and an idle
/// scheduler restarts its round at Voice.
class WeightedRoundRobinQueueDisc final : public QueueDisc {
public:
    WeightedRoundRobinQueueDisc(std::size_t shared_capacity, PerClass<std::uint32_t> weights);

    Verdict enqueue(const Packet &p, SimTime now) override;
    std::optional<Packet> dequeue(SimTime now) override;
    Backlog backlog() const override;
    QdiscKind kind() const noexcept override { return QdiscKind::WeightedRoundRobin; }

    TrafficClass cursor() const noexcept { return static_cast<TrafficClass>(cursor_); }
    std::uint32_t credit() const noexcept { return credit_; }

private:
    void reset_round() noexcept;
    void advance() noexcept;

    std::size_t capacity_;
    PerClass<std::uint32_t> weights_;
    PerClass<std::deque<Packet>> queues_;
    std::size_t total_ = 0;
    std::size_t cursor_ = 0;
    std::uint32_t credit_ = 0;
};

std::unique_ptr<QueueDisc> make_queue_disc(const QdiscConfig &config);

} // namespace stepnet
