#include "stepnet/traffic.hpp"

#include "stepnet/topology.hpp"

#include <cmath>

namespace stepnet {

std::string_view name_of(AppKind a) noexcept
{
    switch (a) {
    case AppKind::Voip: return "voip";
    case AppKind::Video: return "video";
    case AppKind::Ftp: return "ftp";
    case AppKind::Poisson: return "poisson";
    }
    return "unknown";
}

std::vector<std::uint32_t> fragment(std::uint64_t total, std::uint32_t mtu_payload)
{
    if (total == 0 || mtu_payload == 0) {
        throw ConfigError("fragment needs a positive message size and MTU");
    }
    const std::uint64_t full = total / mtu_payload;
    const auto rest = static_cast<std::uint32_t>(total % mtu_payload);
    std::vector<std::uint32_t> sizes(full, mtu_payload);
    if (rest != 0) {
        sizes.push_back(rest);
    }
    return sizes;
}

namespace {

void append_message(Emission &e, const FlowSpec &f, std::uint64_t bytes, SimTime now)
{
    const TrafficClass cls = classify(f.tos);
    for (std::uint32_t size : fragment(bytes, f.mtu_payload)) {
        Packet p;
        p.flow = f.id;
        p.cls = cls;
        p.tos = f.tos;
        p.size = size;
        p.created = now;
        p.src = f.src;
        p.dst = f.dst;
        e.packets.push_back(p);
    }
}

template <class Params>
const Params &params_as(const FlowSpec &f)
{
    if (const auto *p = std::get_if<Params>(&f.params)) {
        return *p;
    }
    throw ConfigError("flow " + std::to_string(f.id) + " has parameters of the wrong application");
}

} // namespace

Emission voip_generate(const FlowSpec &f, SimTime now)
{
    const auto &v = params_as<VoipParams>(f);
    Emission e;
    append_message(e, f, v.frame_payload, now);
    e.next = now + v.frame_interval;
    return e;
}

Emission video_generate(const FlowSpec &f, SimTime now)
{
    const auto &v = params_as<VideoParams>(f);
    Emission e;
    append_message(e, f, v.frame_size, now);
    e.next = now + 1.0 / v.frame_rate;
    return e;
}

Emission ftp_generate(const FlowSpec &f, SimTime now)
{
    const auto &v = params_as<FtpParams>(f);
    Emission e;
    append_message(e, f, v.file_size, now);
    e.next = now + v.inter_request;
    return e;
}

double offered_rate_bps(const FlowSpec &f)
{
    return std::visit(
        [](const auto &p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, VoipParams>) {
                return p.frame_payload * 8.0 / p.frame_interval;
            } else if constexpr (std::is_same_v<T, VideoParams>) {
                return p.frame_size * p.frame_rate * 8.0;
            } else if constexpr (std::is_same_v<T, FtpParams>) {
                return p.file_size * 8.0 / p.inter_request;
            } else {
                return p.rate * p.mean_size * 8.0;
            }
        },
        f.params);
}

FlowGenerator::FlowGenerator(FlowSpec spec, std::uint64_t master_seed) : spec_(std::move(spec))
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(spec_.id), 0x5eedf10u};
    rng_.seed(seq);
}

double FlowGenerator::uniform01()
{
    // 53 random bits -> [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double FlowGenerator::exponential(double mean)
{
    return -mean * std::log1p(-uniform01());
}

Emission FlowGenerator::generate(SimTime now)
{
    ++emitted_;
    const auto on_grid = [&](Emission e, double period) {
        e.next = spec_.start + static_cast<double>(emitted_) * period;
        return e;
    };
    switch (spec_.app) {
    case AppKind::Voip:
        return on_grid(voip_generate(spec_, now), params_as<VoipParams>(spec_).frame_interval);
    case AppKind::Video:
        return on_grid(video_generate(spec_, now), 1.0 / params_as<VideoParams>(spec_).frame_rate);
    case AppKind::Ftp:
        return on_grid(ftp_generate(spec_, now), params_as<FtpParams>(spec_).inter_request);
    case AppKind::Poisson: break;
    }
    const auto &p = params_as<PoissonParams>(spec_);
    // Draw the size first, then the gap, so both streams stay aligned per packet.
    const auto bytes = static_cast<std::uint64_t>(std::max(1.0, std::ceil(exponential(p.mean_size))));
    Emission e;
    append_message(e, spec_, bytes, now);
    e.next = now + exponential(1.0 / p.rate);
    return e;
}

void sink_receive(MetricStore &m, const Packet &p, NodeId at, SimTime now)
{
    if (p.dst != at) {
        throw MetricError("packet " + std::to_string(p.id) + " for node " + std::to_string(p.dst) +
                          " delivered to node " + std::to_string(at));
    }
    m.on_delivered(p.id, now);
}

} // namespace stepnet
