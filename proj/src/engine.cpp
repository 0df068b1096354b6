#include "rplsim/engine.hpp"

#include <string>

namespace rplsim {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::TimerFire: return "timer-fire";
    case EventKind::TxStart: return "tx-start";
    case EventKind::TxEnd: return "tx-end";
    case EventKind::RxDeliver: return "rx-deliver";
    case EventKind::AppSend: return "app-send";
    }
    return "unknown";
}

EventHandle Engine::schedule(SimTime at, EventKind kind, NodeId target, Action action)
{
    if (at < now_) {
        throw ContractViolation("event scheduled in the past: fire_time=" + std::to_string(at.count()) +
                                "us clock=" + std::to_string(now_.count()) + "us kind=" + std::string(to_string(kind)));
    }
    const std::uint64_t sequence = next_sequence_++;
    queue_.push(Key{at, sequence});
    actions_.emplace(sequence, Pending{std::move(action), target, kind});
    return EventHandle{sequence};
}

bool Engine::cancel(EventHandle handle)
{
    return actions_.erase(handle.sequence) > 0;
}

SimTime Engine::run_until(SimTime end_time)
{
    if (end_time < now_)
        throw ContractViolation("run_until: end_time precedes current clock");

    while (!queue_.empty() && queue_.top().fire_time <= end_time) {
        const Key key = queue_.top();
        queue_.pop();
        auto it = actions_.find(key.sequence);
        if (it == actions_.end())
            continue; // cancelled

        Pending pending = std::move(it->second);
        actions_.erase(it);
        now_ = key.fire_time;
        ++executed_;
        if (observer_)
            observer_(EventRecord{key.fire_time, key.sequence, pending.target, pending.kind});
        pending.action();
    }
    now_ = end_time;
    return now_;
}

} // namespace rplsim
