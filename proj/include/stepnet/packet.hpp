#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace stepnet {

using SimTime = double;
using NodeId = std::uint32_t;
using FlowId = std::uint32_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kNoNode = ~NodeId{0};

/// Service classes, in strict priority order (Voice is served first by PQ).
enum class TrafficClass : std::uint8_t { Voice = 0, Video = 1, BestEffort = 2 };

inline constexpr std::size_t kClassCount = 3;
inline constexpr std::array<TrafficClass, kClassCount> kAllClasses{
    TrafficClass::Voice, TrafficClass::Video, TrafficClass::BestEffort};

template <class T>
using PerClass = std::array<T, kClassCount>;

constexpr std::size_t index_of(TrafficClass c) noexcept { return static_cast<std::size_t>(c); }

constexpr int priority_rank(TrafficClass c) noexcept { return static_cast<int>(c); }

/// ToS marking carried by each class.
constexpr int tos_of(TrafficClass c) noexcept
{
    switch (c) {
    case TrafficClass::Voice: return 6;
    case TrafficClass::Video: return 4;
    case TrafficClass::BestEffort: return 0;
    }
    return 0;
}

constexpr std::string_view name_of(TrafficClass c) noexcept
{
    switch (c) {
    case TrafficClass::Voice: return "voice";
    case TrafficClass::Video: return "video";
    case TrafficClass::BestEffort: return "besteffort";
    }
    return "unknown";
}

/// Maps a ToS value to its class. Unknown markings fall back to BestEffort.
constexpr TrafficClass classify(int tos) noexcept
{
    switch (tos) {
    case 6: return TrafficClass::Voice;
    case 4: return TrafficClass::Video;
    default: return TrafficClass::BestEffort;
    }
}

constexpr bool is_mapped_tos(int tos) noexcept { return tos == 0 || tos == 4 || tos == 6; }

/// Classifier that also counts markings outside {0, 4, 6}.
struct TosClassifier {
    std::uint64_t unmapped = 0;

    TrafficClass operator()(int tos) noexcept
    {
        if (!is_mapped_tos(tos))
            ++unmapped;
        return classify(tos);
    }
};

struct Packet {
    PacketId id = 0;
    FlowId flow = 0;
    TrafficClass cls = TrafficClass::BestEffort;
    int tos = 0;
    std::uint32_t size = 0; // payload bytes
    SimTime created = 0.0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    std::uint32_t hops = 0;      // links traversed so far
    SimTime enqueued_at = 0.0;   // time of the most recent qdisc admission
};

} // namespace stepnet
