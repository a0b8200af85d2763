#pragma once

#include "stepnet/metrics.hpp"
#include "stepnet/packet.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

namespace stepnet {

enum class AppKind : std::uint8_t { Voip, Video, Ftp, Poisson };

std::string_view name_of(AppKind a) noexcept;

/// Default ToS marking for each application.
constexpr int default_tos(AppKind app) noexcept
{
    switch (app) {
    case AppKind::Voip: return 6;
    case AppKind::Video: return 4;
    case AppKind::Ftp: return 0;
    case AppKind::Poisson: return 0;
    }
    return 0;
}

/// 64 kbit/s PCM speech: 160 bytes every 20 ms, no silence suppression.
struct VoipParams {
    double frame_interval = 0.02;
    std::uint32_t frame_payload = 160;
};

/// Low resolution video: 128x120 frames at one byte per pixel, 10 fps.
struct VideoParams {
    double frame_rate = 10.0;
    std::uint32_t frame_size = 15'360;
};

/// One file pushed per request.
struct FtpParams {
    double inter_request = 10.0;
    std::uint32_t file_size = 1'000'000;
};

/// Exponential inter-arrivals and exponential sizes. Used for queueing-theory
/// validation only.
struct PoissonParams {
    double rate = 500.0;       // packets per second
    double mean_size = 1250.0; // bytes
};

using AppParams = std::variant<VoipParams, VideoParams, FtpParams, PoissonParams>;

struct FlowSpec {
    FlowId id = 0;
    AppKind app = AppKind::Voip;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    int tos = 6;
    SimTime start = 0.0;
    SimTime stop = 0.0;
    std::uint32_t mtu_payload = 1500;
    AppParams params = VoipParams{};
};

/// Packets produced at one generation instant plus the time of the next one.
struct Emission {
    std::vector<Packet> packets;
    SimTime next = 0.0;
};

/// Splits a message into MTU-sized payloads; only the last may be short.
std::vector<std::uint32_t> fragment(std::uint64_t total, std::uint32_t mtu_payload);

Emission voip_generate(const FlowSpec &f, SimTime now);
Emission video_generate(const FlowSpec &f, SimTime now);
Emission ftp_generate(const FlowSpec &f, SimTime now);

/// Closed-form long-run offered load in bits per second.
double offered_rate_bps(const FlowSpec &f);

/// Stateful per-flow source. Randomness (Poisson flows only) comes from a
/// substream derived from (master seed, flow id), so adding a flow leaves the
/// other flows' draws untouched.
class FlowGenerator {
public:
    FlowGenerator(FlowSpec spec, std::uint64_t master_seed);

    const FlowSpec &spec() const noexcept { return spec_; }
    /// Packets have id 0; the caller assigns ids. Periodic sources schedule
    /// the k-th emission at start + k * period so the grid does not drift.
    Emission generate(SimTime now);

private:
    double uniform01();
    double exponential(double mean);

    FlowSpec spec_;
    std::mt19937_64 rng_;
    std::uint64_t emitted_ = 0;
};

/// Receiver-side bookkeeping: records the delivery, or throws MetricError if
/// the packet reached a host other than its destination.
void sink_receive(MetricStore &m, const Packet &p, NodeId at, SimTime now);

} // namespace stepnet
