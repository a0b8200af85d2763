#pragma once

#include "stepnet/packet.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace stepnet {

/// Raised when the kernel is asked to do something that can only come from a bug
/// in the model wiring, e.g. scheduling into the past.
class KernelError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct EventHandle {
    std::uint64_t seq = 0;
    friend bool operator==(EventHandle, EventHandle) = default;
};

template <class Payload>
struct Event {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    Payload payload{};
};

/// Pending events ordered by (time, seq). seq is assigned at schedule time, so
/// events at the same instant pop in the order they were scheduled.
template <class Payload>
class EventCalendar {
public:
    EventHandle schedule(SimTime time, Payload payload)
    {
        if (!std::isfinite(time)) {
            throw KernelError("event scheduled at non-finite time");
        }
        if (time < now_) {
            std::ostringstream os;
            os << "event scheduled in the past: t=" << time << " < clock=" << now_;
            throw KernelError(os.str());
        }
        const std::uint64_t seq = next_seq_++;
        heap_.push(Entry{time, seq, std::move(payload)});
        pending_.insert(seq);
        return EventHandle{seq};
    }

    /// Marks a pending event so it is never delivered. Returns false if the
    /// handle was already delivered or cancelled.
    bool cancel(EventHandle h)
    {
        if (pending_.erase(h.seq) == 0) {
            return false;
        }
        cancelled_.insert(h.seq);
        return true;
    }

    /// Removes the minimum (time, seq) event and advances the clock to it.
    std::optional<Event<Payload>> next()
    {
        while (!heap_.empty()) {
            Entry top = heap_.top();
            heap_.pop();
            if (auto it = cancelled_.find(top.seq); it != cancelled_.end()) {
                cancelled_.erase(it);
                continue;
            }
            now_ = top.time;
            pending_.erase(top.seq);
            return Event<Payload>{top.time, top.seq, std::move(top.payload)};
        }
        return std::nullopt;
    }

    /// Time of the next deliverable event without removing it.
    std::optional<SimTime> peek_time()
    {
        drop_cancelled_head();
        if (heap_.empty()) {
            return std::nullopt;
        }
        return heap_.top().time;
    }

    SimTime now() const noexcept { return now_; }
    std::size_t size() const noexcept { return pending_.size(); }
    bool empty() const noexcept { return size() == 0; }

private:
    struct Entry {
        SimTime time;
        std::uint64_t seq;
        Payload payload;
    };
    struct Later {
        bool operator()(const Entry &a, const Entry &b) const noexcept
        {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };

    void drop_cancelled_head()
    {
        while (!heap_.empty()) {
            auto it = cancelled_.find(heap_.top().seq);
            if (it == cancelled_.end()) {
                return;
            }
            cancelled_.erase(it);
            heap_.pop();
        }
    }

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::unordered_set<std::uint64_t> pending_;
    std::uint64_t next_seq_ = 0;
    SimTime now_ = 0.0;
};

struct RunSummary {
    std::uint64_t events_processed = 0;
    SimTime final_clock = 0.0;
};

} // namespace stepnet
