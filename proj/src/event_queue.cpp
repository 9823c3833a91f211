#include "vhsim/event_queue.hpp"

#include <cstdio>
#include <stdexcept>
#include <utility>

namespace vhsim {

const char* event_kind_name(EventKind k)
{
    switch (k) {
    case EventKind::PacketArrival:    return "packet-arrival";
    case EventKind::TimerExpiry:      return "timer-expiry";
    case EventKind::InterfaceReady:   return "interface-ready";
    case EventKind::ActivityComplete: return "activity-complete";
    case EventKind::TrafficEmit:      return "traffic-emit";
    }
    return "unknown";
}

void TraceLog::append(SimTime at, EventKind kind, const std::string& device,
                      const std::string& detail)
{
    char head[32];
    std::snprintf(head, sizeof head, "%llu",
                  static_cast<unsigned long long>(at.us));
    text_ += head;
    text_ += '\t';
    text_ += event_kind_name(kind);
    text_ += '\t';
    text_ += device;
    text_ += '\t';
    text_ += detail;
    text_ += '\n';
    ++lines_;
}

EventQueue::Handle EventQueue::schedule(SimTime fire_at, EventKind kind,
                                        std::string device, std::string detail,
                                        std::function<void()> action)
{
    if (fire_at < now_)
        throw std::logic_error("schedule: fire_at precedes current time");
    auto ev = std::make_shared<Event>();
    ev->fire_at = fire_at;
    ev->seq = next_seq_++;
    ev->kind = kind;
    ev->device = std::move(device);
    ev->detail = std::move(detail);
    ev->action = std::move(action);
    queue_.push(ev);
    ++live_;
    return ev;
}

bool EventQueue::cancel(const Handle& h)
{
    if (!h || h->cancelled || !h->action)
        return false;
    h->cancelled = true;
    --live_;
    return true;
}

SimTime EventQueue::run_until(SimTime deadline)
{
    while (!queue_.empty()) {
        Handle ev = queue_.top();
        if (ev->cancelled) {
            queue_.pop();
            continue;
        }
        if (deadline < ev->fire_at)
            break;
        queue_.pop();
        now_ = ev->fire_at;
        if (trace_)
            trace_->append(now_, ev->kind, ev->device, ev->detail);
        auto action = std::move(ev->action);
        ev->action = nullptr;
        --live_;
        ++fired_;
        action();
    }
    now_ = deadline;
    return now_;
}

} // namespace vhsim
