#include "reference_qdisc.hpp"
#include "stepnet/qdisc.hpp"
#include "stepnet/topology.hpp"

#include <doctest.h>

#include <random>

using namespace stepnet;
using stepnet::testing::make_packet;
using stepnet::testing::ReferenceQdisc;

namespace {

QdiscConfig config(QdiscKind k)
{
    QdiscConfig c;
    c.kind = k;
    return c;
}

} // namespace

TEST_CASE("classify maps ToS values and counts unknown ones")
{
    TosClassifier cls;
    CHECK(cls(6) == TrafficClass::Voice);
    CHECK(cls(4) == TrafficClass::Video);
    CHECK(cls(0) == TrafficClass::BestEffort);
    CHECK(cls.unmapped == 0);
    CHECK(cls(3) == TrafficClass::BestEffort);
    CHECK(cls.unmapped == 1);
    for (TrafficClass c : kAllClasses) {
        CHECK(classify(tos_of(c)) == c);
    }
}

TEST_CASE("FIFO capacity boundary")
{
    FifoQueueDisc q(500);
    for (PacketId i = 0; i < 499; ++i) {
        REQUIRE(q.enqueue(make_packet(i, TrafficClass::Video), 0.0) == Verdict::Accepted);
    }
    CHECK(q.enqueue(make_packet(499, TrafficClass::Voice), 0.0) == Verdict::Accepted);
    CHECK(q.enqueue(make_packet(500, TrafficClass::Voice), 0.0) == Verdict::Dropped);
    CHECK(q.drops()[index_of(TrafficClass::Voice)] == 1);
    CHECK(q.backlog().total == 500);
}

TEST_CASE("PQ serves voice first and keeps separate buffers")
{
    PriorityQueueDisc q({2, 2, 2});
    q.enqueue(make_packet(0, TrafficClass::BestEffort), 0.0);
    q.enqueue(make_packet(1, TrafficClass::Video), 0.0);
    q.enqueue(make_packet(2, TrafficClass::Voice), 0.0);
    CHECK(q.enqueue(make_packet(3, TrafficClass::Voice), 0.0) == Verdict::Accepted);
    CHECK(q.enqueue(make_packet(4, TrafficClass::Voice), 0.0) == Verdict::Dropped);
    CHECK(q.enqueue(make_packet(5, TrafficClass::BestEffort), 0.0) == Verdict::Accepted);
    CHECK(q.dequeue(0.0)->id == 2);
    CHECK(q.dequeue(0.0)->id == 3);
    CHECK(q.dequeue(0.0)->id == 1);
    CHECK(q.dequeue(0.0)->id == 0);
    CHECK(q.dequeue(0.0)->id == 5);
    CHECK_FALSE(q.dequeue(0.0));
}

TEST_CASE("PQ starves best effort under continuous voice backlog")
{
    PriorityQueueDisc q({500, 500, 500});
    q.enqueue(make_packet(0, TrafficClass::BestEffort), 0.0);
    PacketId next = 1;
    std::size_t be_served = 0;
    for (int step = 0; step < 100'000; ++step) {
        q.enqueue(make_packet(next++, TrafficClass::Voice), 0.0);
        if (q.dequeue(0.0)->cls == TrafficClass::BestEffort) {
            ++be_served;
        }
    }
    CHECK(be_served == 0);
    CHECK(q.backlog().per_class[index_of(TrafficClass::BestEffort)] == 1);
}

TEST_CASE("WFQ shared buffer full of video drops voice")
{
    WeightedRoundRobinQueueDisc q(500, {60, 40, 10});
    for (PacketId i = 0; i < 500; ++i) {
        REQUIRE(q.enqueue(make_packet(i, TrafficClass::Video), 0.0) == Verdict::Accepted);
    }
    CHECK(q.enqueue(make_packet(500, TrafficClass::Voice), 0.0) == Verdict::Dropped);
    CHECK(q.drops()[index_of(TrafficClass::Voice)] == 1);
}

TEST_CASE("WFQ 5/3/1 round pattern")
{
    WeightedRoundRobinQueueDisc q(1000, {5, 3, 1});
    PacketId id = 0;
    for (int i = 0; i < 50; ++i) {
        for (TrafficClass c : kAllClasses) {
            q.enqueue(make_packet(id++, c), 0.0);
        }
    }
    const std::vector<TrafficClass> round = {
        TrafficClass::Voice, TrafficClass::Voice, TrafficClass::Voice, TrafficClass::Voice, TrafficClass::Voice,
        TrafficClass::Video, TrafficClass::Video, TrafficClass::Video, TrafficClass::BestEffort};
    for (int r = 0; r < 5; ++r) {
        for (TrafficClass expected : round) {
            REQUIRE(q.dequeue(0.0)->cls == expected);
        }
    }
}

TEST_CASE("WFQ 60/40 gives exactly 60 voice and 40 video per 100 dequeues")
{
    WeightedRoundRobinQueueDisc q(1000, {60, 40, 10});
    PacketId id = 0;
    for (int i = 0; i < 300; ++i) {
        q.enqueue(make_packet(id++, TrafficClass::Voice), 0.0);
        q.enqueue(make_packet(id++, TrafficClass::Video), 0.0);
    }
    for (int window = 0; window < 3; ++window) {
        int voice = 0;
        int video = 0;
        for (int i = 0; i < 100; ++i) {
            (q.dequeue(0.0)->cls == TrafficClass::Voice ? voice : video)++;
        }
        CHECK(voice == 60);
        CHECK(video == 40);
    }
}

TEST_CASE("WFQ skips empty classes and resets when idle")
{
    WeightedRoundRobinQueueDisc q(100, {2, 2, 2});
    q.enqueue(make_packet(0, TrafficClass::BestEffort), 0.0);
    q.enqueue(make_packet(1, TrafficClass::BestEffort), 0.0);
    q.enqueue(make_packet(2, TrafficClass::BestEffort), 0.0);
    CHECK(q.dequeue(0.0)->id == 0);
    CHECK(q.cursor() == TrafficClass::BestEffort);
    q.enqueue(make_packet(3, TrafficClass::Voice), 0.0);
    CHECK(q.dequeue(0.0)->id == 1); // best effort still holds credit
    CHECK(q.dequeue(0.0)->id == 3); // credit spent, cursor wraps to voice
    CHECK(q.dequeue(0.0)->id == 2);
    CHECK_FALSE(q.dequeue(0.0));
    CHECK(q.cursor() == TrafficClass::Voice);
    CHECK(q.credit() == 2);
}

TEST_CASE("backlog counts")
{
    for (QdiscKind k : {QdiscKind::Fifo, QdiscKind::Priority, QdiscKind::WeightedRoundRobin}) {
        auto q = make_queue_disc(config(k));
        CHECK(q->backlog().total == 0);
        q->enqueue(make_packet(0, TrafficClass::Voice), 0.0);
        q->enqueue(make_packet(1, TrafficClass::Video), 0.0);
        q->enqueue(make_packet(2, TrafficClass::Video), 0.0);
        q->dequeue(0.0);
        const Backlog b = q->backlog();
        CHECK(b.total == 2);
        CHECK(b.per_class[0] + b.per_class[1] + b.per_class[2] == b.total);
    }
}

TEST_CASE("invalid configs are rejected")
{
    QdiscConfig c;
    c.fifo_capacity = 0;
    CHECK_THROWS_AS(make_queue_disc(c), ConfigError);
    QdiscConfig w;
    w.kind = QdiscKind::WeightedRoundRobin;
    w.wfq_weights[2] = 0;
    CHECK_THROWS_AS(make_queue_disc(w), ConfigError);
}

TEST_CASE("enqueue stamps admission time")
{
    FifoQueueDisc q(4);
    q.enqueue(make_packet(0, TrafficClass::Voice), 1.25);
    CHECK(q.dequeue(2.0)->enqueued_at == 1.25);
}

TEST_CASE("property: every discipline matches the list-scan reference and its invariants")
{
    std::mt19937_64 rng(7);
    for (QdiscKind kind : {QdiscKind::Fifo, QdiscKind::Priority, QdiscKind::WeightedRoundRobin}) {
        for (int trial = 0; trial < 40; ++trial) {
            QdiscConfig cfg = config(kind);
            std::uniform_int_distribution<std::size_t> cap(1, 12);
            std::uniform_int_distribution<std::uint32_t> weight(1, 6);
            cfg.fifo_capacity = cap(rng);
            cfg.wfq_capacity = cap(rng);
            cfg.pq_capacity = {cap(rng), cap(rng), cap(rng)};
            cfg.wfq_weights = {weight(rng), weight(rng), weight(rng)};

            auto q = make_queue_disc(cfg);
            ReferenceQdisc ref(cfg);
            std::uniform_int_distribution<int> op(0, 99);
            std::uniform_int_distribution<int> cls(0, 2);
            const int enqueue_bias = 30 + trial; // sweep from drain-heavy to overload
            PerClass<PacketId> last_out{0, 0, 0};
            PerClass<bool> seen{false, false, false};
            PacketId id = 0;
            for (int step = 0; step < 2000; ++step) {
                if (op(rng) < enqueue_bias) {
                    const auto p = make_packet(id++, static_cast<TrafficClass>(cls(rng)));
                    const Backlog before = q->backlog();
                    const Verdict v = q->enqueue(p, 0.0);
                    REQUIRE(v == ref.enqueue(p));
                    if (v == Verdict::Dropped) {
                        // drops only at the exact capacity bound
                        const std::size_t bound = kind == QdiscKind::Fifo     ? cfg.fifo_capacity
                                                  : kind == QdiscKind::Priority ? cfg.pq_capacity[index_of(p.cls)]
                                                                                : cfg.wfq_capacity;
                        const std::size_t held =
                            kind == QdiscKind::Priority ? before.per_class[index_of(p.cls)] : before.total;
                        REQUIRE(held == bound);
                    }
                } else {
                    const Backlog before = q->backlog();
                    auto got = q->dequeue(0.0);
                    auto want = ref.dequeue();
                    REQUIRE(got.has_value() == want.has_value());
                    REQUIRE(got.has_value() == (before.total > 0)); // work conserving
                    if (got) {
                        REQUIRE(got->id == want->id);
                        const auto c = index_of(got->cls);
                        REQUIRE((!seen[c] || got->id > last_out[c])); // per-class FIFO
                        seen[c] = true;
                        last_out[c] = got->id;
                        if (kind == QdiscKind::Priority) {
                            for (std::size_t hi = 0; hi < c; ++hi) {
                                REQUIRE(before.per_class[hi] == 0);
                            }
                        }
                    }
                }
                const Backlog b = q->backlog();
                REQUIRE(b.per_class[0] + b.per_class[1] + b.per_class[2] == b.total);
                REQUIRE(b.total == ref.total());
            }
            REQUIRE(q->drops() == ref.drops);
        }
    }
}

TEST_CASE("property: WFQ proportionality over whole rounds")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint32_t> weight(1, 9);
    for (int trial = 0; trial < 50; ++trial) {
        const PerClass<std::uint32_t> w{weight(rng), weight(rng), weight(rng)};
        WeightedRoundRobinQueueDisc q(100'000, w);
        PacketId id = 0;
        for (int i = 0; i < 2000; ++i) {
            for (TrafficClass c : kAllClasses) {
                q.enqueue(make_packet(id++, c), 0.0);
            }
        }
        const std::uint32_t round = w[0] + w[1] + w[2];
        const int rounds = 7;
        PerClass<std::uint32_t> served{};
        for (std::uint32_t i = 0; i < round * rounds; ++i) {
            ++served[index_of(q.dequeue(0.0)->cls)];
        }
        for (std::size_t c = 0; c < 3; ++c) {
            REQUIRE(served[c] == w[c] * rounds);
        }
    }
}
