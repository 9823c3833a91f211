#ifndef VHSIM_EVENT_QUEUE_HPP
#define VHSIM_EVENT_QUEUE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "vhsim/sim_time.hpp"

namespace vhsim {

// Closed set of event kinds; every scheduled occurrence is one of these.
enum class EventKind {
    PacketArrival,
    TimerExpiry,
    InterfaceReady,
    ActivityComplete,
    TrafficEmit,
};

const char* event_kind_name(EventKind k);

// Collects one tab-separated line per fired event:
//   time_us \t kind \t device \t detail
// Field order is stable so runs can be compared byte for byte.
class TraceLog {
public:
    void append(SimTime at, EventKind kind, const std::string& device,
                const std::string& detail);
    const std::string& text() const { return text_; }
    std::size_t lines() const { return lines_; }

private:
    std::string text_;
    std::size_t lines_ = 0;
};

// Deterministic discrete-event queue. Events fire in (fire_at, seq) order;
// seq is assigned at scheduling time, so same-instant events fire in the
// order they were scheduled.
class EventQueue {
public:
    struct Event {
        SimTime fire_at;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::TimerExpiry;
        std::string device;
        std::string detail;
        std::function<void()> action;
        bool cancelled = false;
    };

    using Handle = std::shared_ptr<Event>;

    // Throws std::logic_error when fire_at < now().
    Handle schedule(SimTime fire_at, EventKind kind, std::string device,
                    std::string detail, std::function<void()> action);

    // Returns false when the event already fired or was cancelled before.
    bool cancel(const Handle& h);

    // Processes every event with fire_at <= deadline, in order, and returns
    // the final clock value (the deadline, even when the queue drains early).
    SimTime run_until(SimTime deadline);

    SimTime now() const { return now_; }
    std::size_t pending() const { return live_; }
    std::uint64_t fired() const { return fired_; }

    void set_trace(TraceLog* trace) { trace_ = trace; }

private:
    struct Later {
        bool operator()(const Handle& a, const Handle& b) const
        {
            if (a->fire_at != b->fire_at)
                return a->fire_at > b->fire_at;
            return a->seq > b->seq;
        }
    };

    std::priority_queue<Handle, std::vector<Handle>, Later> queue_;
    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t fired_ = 0;
    std::size_t live_ = 0;
    TraceLog* trace_ = nullptr;
};

} // namespace vhsim

#endif
