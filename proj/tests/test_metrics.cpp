#include "stepnet/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace stepnet;

namespace {

Packet packet(PacketId id, TrafficClass c, SimTime created, std::uint32_t size = 160)
{
    Packet p;
    p.id = id;
    p.cls = c;
    p.size = size;
    p.created = created;
    return p;
}

} // namespace

TEST_CASE("e2e delay")
{
    PacketRecord r;
    r.created = 2.0;
    r.delivered = 2.004;
    CHECK(e2e_delay(r) == doctest::Approx(0.004));
    PacketRecord lost;
    CHECK_THROWS_AS(e2e_delay(lost), MetricError);
}

TEST_CASE("delay variation is the population variance")
{
    const std::vector<double> flat{0.002, 0.002, 0.002};
    CHECK(*delay_variation(flat) == doctest::Approx(0.0));
    const std::vector<double> two{0.001, 0.003};
    CHECK(*delay_variation(two) == doctest::Approx(1e-6)); // 1 ms^2
    const std::vector<double> one{0.5};
    CHECK_FALSE(delay_variation(one));
}

TEST_CASE("property: variance is shift invariant and scales quadratically")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> d(2 + trial);
        for (auto &x : d) {
            x = u(rng);
        }
        const double v = *delay_variation(d);
        auto shifted = d;
        auto scaled = d;
        for (std::size_t i = 0; i < d.size(); ++i) {
            shifted[i] += 0.25;
            scaled[i] *= 3.0;
        }
        REQUIRE(*delay_variation(shifted) == doctest::Approx(v).epsilon(1e-9));
        REQUIRE(*delay_variation(scaled) == doctest::Approx(9.0 * v).epsilon(1e-9));
    }
}

TEST_CASE("interarrival jitter estimator")
{
    const std::vector<double> flat(10, 0.004);
    CHECK(*jitter_rfc(flat) == 0.0);
    const std::vector<double> one{0.001};
    CHECK_FALSE(jitter_rfc(one));

    // Alternating 1 ms / 3 ms: every |D| is 2 ms, so after n updates the
    // filter sits at 2 ms * (1 - (15/16)^n).
    std::vector<double> alt;
    for (int i = 0; i <= 100; ++i) {
        alt.push_back(i % 2 ? 0.003 : 0.001);
    }
    const double closed_form = 0.002 * (1.0 - std::pow(15.0 / 16.0, 100));
    CHECK(*jitter_rfc(alt) == doctest::Approx(closed_form).epsilon(1e-12));
    CHECK(*jitter_rfc(alt) == doctest::Approx(0.0019984).epsilon(1e-4));
}

TEST_CASE("traffic received series")
{
    MetricStore empty(MetricOptions{3.0});
    auto z = traffic_received(empty, TrafficClass::Voice);
    REQUIRE(z.size() == 3);
    for (const auto &p : z) {
        CHECK(p.bytes_per_s == 0.0);
    }

    MetricStore m(MetricOptions{2.0});
    for (PacketId i = 0; i < 50; ++i) {
        const SimTime t = 0.02 * static_cast<double>(i);
        m.on_sent(packet(i, TrafficClass::Voice, t));
        m.on_delivered(i, t + 0.001);
    }
    auto s = traffic_received(m, TrafficClass::Voice);
    REQUIRE(s.size() == 2);
    CHECK(s[0].bytes_per_s == 8000.0);
    CHECK(s[0].packets_per_s == 50.0);
    CHECK(s[1].bytes_per_s == 0.0);
    double total = 0.0;
    for (const auto &p : s) {
        total += p.bytes_per_s * m.options().window;
    }
    CHECK(total == 8000.0);
}

TEST_CASE("window timestamps are multiples of the window inside the run")
{
    MetricStore m(MetricOptions{10.0, 2.5});
    CHECK(m.window_count() == 4);
    auto s = traffic_received(m, TrafficClass::Video);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].time == 2.5 * static_cast<double>(i));
        CHECK(s[i].time < 10.0);
    }
    CHECK(m.window_index(10.0) == 3); // deliveries at the very end land in the last window
}

TEST_CASE("drops per node and per class")
{
    MetricStore m(MetricOptions{2.0});
    for (PacketId i = 0; i < 6; ++i) {
        m.on_sent(packet(i, i < 4 ? TrafficClass::Voice : TrafficClass::Video, 0.1));
    }
    m.on_dropped(0, 3, 0.2);
    m.on_dropped(1, 3, 1.2);
    m.on_dropped(2, 5, 1.3);
    m.on_dropped(4, 5, 1.4);
    auto d = drops(m, TrafficClass::Voice);
    CHECK(d.total == 3);
    CHECK(d.per_node.at(3) == 2);
    CHECK(d.per_node.at(5) == 1);
    std::uint64_t sum = 0;
    for (auto [node, n] : d.per_node) {
        sum += n;
    }
    CHECK(sum == d.total);
    REQUIRE(d.rate.size() == 2);
    CHECK(d.rate[0].value == 1.0);
    CHECK(d.rate[1].value == 2.0);
    CHECK(drops(m, TrafficClass::BestEffort).total == 0);
}

TEST_CASE("a packet cannot finish twice")
{
    MetricStore m(MetricOptions{1.0});
    m.on_sent(packet(0, TrafficClass::Voice, 0.0));
    m.on_delivered(0, 0.1);
    CHECK_THROWS_AS(m.on_dropped(0, 1, 0.2), MetricError);
    CHECK_THROWS_AS(m.on_sent(packet(5, TrafficClass::Voice, 0.0)), MetricError);
}

TEST_CASE("queuing delay needs per-hop detail")
{
    MetricStore off(MetricOptions{1.0});
    CHECK_THROWS_AS(queuing_delay(off, 0), MetricError);

    MetricStore on(MetricOptions{2.0, 1.0, 0.0, true});
    auto idle = queuing_delay(on, 0);
    REQUIRE(idle.size() == 2);
    CHECK(idle[0].value == 0.0);

    Packet p = packet(0, TrafficClass::Voice, 0.0);
    on.on_sent(p);
    p.enqueued_at = 0.5;
    on.on_dequeued(p, 0, 0.75);
    CHECK(mean_queuing_delay(on, 0) == doctest::Approx(0.25));
    CHECK(queuing_delay(on, 0)[0].value == doctest::Approx(0.25));
    CHECK(mean_queuing_delay(on, 1) == 0.0);
}

TEST_CASE("summary: empty run, conservation and independent mean")
{
    MetricStore empty(MetricOptions{5.0});
    const Summary z = summarize(empty);
    for (const auto &c : z.per_class) {
        CHECK(c.sent == 0);
        CHECK(c.delivered == 0);
    }

    MetricStore m(MetricOptions{10.0});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> delivered_delays;
    for (PacketId i = 0; i < 500; ++i) {
        const SimTime t = 9.0 * u(rng);
        m.on_sent(packet(i, TrafficClass::Video, t, 1000));
        const double r = u(rng);
        if (r < 0.7) {
            const double d = 0.05 * u(rng);
            m.on_delivered(i, t + d);
            delivered_delays.push_back(d);
        } else if (r < 0.9) {
            m.on_dropped(i, 2, t);
        }
    }
    const auto s = summarize(m).per_class[index_of(TrafficClass::Video)];
    CHECK(s.sent == s.delivered + s.dropped + s.in_flight);
    CHECK(s.delivered == delivered_delays.size());
    double mean = 0.0;
    for (double d : delivered_delays) {
        mean += d;
    }
    mean /= static_cast<double>(delivered_delays.size());
    CHECK(s.mean_delay == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.throughput_bps == doctest::Approx(delivered_delays.size() * 1000.0 * 8.0 / 10.0));
}

TEST_CASE("warmup filters statistics but not conservation")
{
    MetricStore m(MetricOptions{10.0, 1.0, 5.0});
    m.on_sent(packet(0, TrafficClass::Voice, 1.0));
    m.on_delivered(0, 1.5);
    m.on_sent(packet(1, TrafficClass::Voice, 6.0));
    m.on_delivered(1, 6.1);
    const auto s = summarize(m).per_class[0];
    CHECK(s.sent == 2);
    CHECK(s.delivered == 2);
    CHECK(s.mean_delay == doctest::Approx(0.1));
}
