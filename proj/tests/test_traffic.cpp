#include "stepnet/topology.hpp"
#include "stepnet/traffic.hpp"

#include <doctest.h>

#include <numeric>

using namespace stepnet;

namespace {

FlowSpec flow(AppKind app, AppParams params, SimTime stop)
{
    FlowSpec f;
    f.app = app;
    f.tos = default_tos(app);
    f.src = 0;
    f.dst = 1;
    f.stop = stop;
    f.params = params;
    return f;
}

struct Offered {
    std::size_t packets = 0;
    std::uint64_t bytes = 0;
    std::size_t generations = 0;
    std::vector<Packet> all;
};

// Drives a generator over [start, stop) the way the engine does.
Offered drive(const FlowSpec &spec, std::uint64_t seed = 1)
{
    FlowGenerator g(spec, seed);
    Offered o;
    SimTime t = spec.start;
    while (t < spec.stop) {
        Emission e = g.generate(t);
        ++o.generations;
        for (const Packet &p : e.packets) {
            ++o.packets;
            o.bytes += p.size;
            o.all.push_back(p);
        }
        t = e.next;
    }
    return o;
}

} // namespace

TEST_CASE("fragment")
{
    CHECK(fragment(1500, 1500) == std::vector<std::uint32_t>{1500});
    auto v = fragment(15'360, 1500);
    REQUIRE(v.size() == 11);
    CHECK(v.back() == 360);
    CHECK(std::count(v.begin(), v.end(), 1500u) == 10);
    CHECK(fragment(1, 1500) == std::vector<std::uint32_t>{1});
    CHECK_THROWS_AS(fragment(0, 1500), ConfigError);
}

TEST_CASE("property: fragments sum to the message and number ceil(total/mtu)")
{
    for (std::uint64_t total : {1ull, 2ull, 999ull, 1500ull, 1501ull, 15'360ull, 1'000'000ull, 3'000'001ull}) {
        for (std::uint32_t mtu : {1u, 7u, 576u, 1500u, 9000u}) {
            auto v = fragment(total, mtu);
            CHECK(std::accumulate(v.begin(), v.end(), std::uint64_t{0}) == total);
            CHECK(v.size() == (total + mtu - 1) / mtu);
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                CHECK(v[i] == mtu);
            }
            CHECK(v.back() >= 1);
            CHECK(v.back() <= mtu);
        }
    }
}

TEST_CASE("VoIP: 50 packets, 8000 bytes, 64 kbps over one second")
{
    auto f = flow(AppKind::Voip, VoipParams{}, 1.0);
    Offered o = drive(f);
    CHECK(o.packets == 50);
    CHECK(o.bytes == 8000);
    CHECK(o.bytes * 8.0 / 1.0 == 64'000.0);
    CHECK(offered_rate_bps(f) == 64'000.0);
    CHECK(o.all.front().created == 0.0);
    for (const Packet &p : o.all) {
        REQUIRE(p.tos == 6);
        REQUIRE(p.cls == TrafficClass::Voice);
        REQUIRE(p.size == 160);
    }

    FlowSpec late = f;
    late.start = 2.5;
    late.stop = 3.0;
    CHECK(drive(late).all.front().created == 2.5);

    auto e = voip_generate(f, 0.3);
    CHECK(e.packets.size() == 1);
    CHECK(e.next == doctest::Approx(0.32));
}

TEST_CASE("video: one frame is eleven fragments, 1.2288 Mbps sustained")
{
    auto f = flow(AppKind::Video, VideoParams{}, 10.0);
    auto e = video_generate(f, 0.0);
    REQUIRE(e.packets.size() == 11);
    CHECK(e.packets.back().size == 360);
    CHECK(e.next == doctest::Approx(0.1));
    for (const Packet &p : e.packets) {
        CHECK(p.tos == 4);
    }
    Offered o = drive(f);
    CHECK(o.generations == 100);
    CHECK(o.bytes * 8.0 / 10.0 == 1'228'800.0);
    CHECK(offered_rate_bps(f) == 1'228'800.0);
}

TEST_CASE("FTP: 667 packets per file, one request every 10 s")
{
    auto f = flow(AppKind::Ftp, FtpParams{}, 100.0);
    auto e = ftp_generate(f, 0.0);
    REQUIRE(e.packets.size() == 667);
    CHECK(e.packets.back().size == 1000);
    CHECK(e.next == 10.0);
    for (const Packet &p : e.packets) {
        REQUIRE(p.tos == 0);
    }
    Offered o = drive(f);
    CHECK(o.generations == 10);
    CHECK(o.bytes * 8.0 / 100.0 == 800'000.0);
    CHECK(offered_rate_bps(f) == 800'000.0);
}

TEST_CASE("wrong parameter block is rejected")
{
    auto f = flow(AppKind::Voip, FtpParams{}, 1.0);
    CHECK_THROWS_AS(voip_generate(f, 0.0), ConfigError);
}

TEST_CASE("Poisson sources are deterministic per (seed, flow id)")
{
    auto f = flow(AppKind::Poisson, PoissonParams{500.0, 1250.0}, 2.0);
    f.id = 3;
    Offered a = drive(f, 99);
    Offered b = drive(f, 99);
    REQUIRE(a.all.size() == b.all.size());
    for (std::size_t i = 0; i < a.all.size(); ++i) {
        REQUIRE(a.all[i].created == b.all[i].created);
        REQUIRE(a.all[i].size == b.all[i].size);
    }
    f.id = 4;
    Offered c = drive(f, 99);
    CHECK((c.all.size() != a.all.size() || c.all[0].size != a.all[0].size));
}

TEST_CASE("Poisson source means match its parameters")
{
    auto f = flow(AppKind::Poisson, PoissonParams{500.0, 1250.0}, 400.0);
    f.mtu_payload = 1'000'000;
    Offered o = drive(f, 5);
    const double n = static_cast<double>(o.packets);
    // 2e5 samples: standard error of an exponential mean is mean / sqrt(n) ~ 0.22%
    CHECK(n / 400.0 == doctest::Approx(500.0).epsilon(0.01));
    CHECK(static_cast<double>(o.bytes) / n == doctest::Approx(1250.5).epsilon(0.01));
}

TEST_CASE("sink_receive records delay and rejects misdelivery")
{
    MetricStore m(MetricOptions{2.0});
    Packet p;
    p.id = 0;
    p.cls = TrafficClass::Voice;
    p.created = 1.0;
    p.dst = 7;
    m.on_sent(p);
    sink_receive(m, p, 7, 1.005);
    CHECK(e2e_delay(m.records()[0]) == doctest::Approx(0.005));
    CHECK(summarize(m).per_class[0].delivered == 1);

    Packet q = p;
    q.id = 1;
    m.on_sent(q);
    CHECK_THROWS_AS(sink_receive(m, q, 8, 1.1), MetricError);
}
