#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rplsim/types.hpp"

namespace rplsim {

enum class EventKind : std::uint8_t
{
    TimerFire,
    TxStart,
    TxEnd,
    RxDeliver,
    AppSend,
};

std::string_view to_string(EventKind kind);

/// Target used for events owned by the shared channel rather than a node.
inline constexpr NodeId kMediumTarget = kNoNode;

struct EventHandle
{
    std::uint64_t sequence = 0;

    explicit operator bool() const { return sequence != 0; }
};

/// What an observer sees for every executed event.
struct EventRecord
{
    SimTime fire_time;
    std::uint64_t sequence;
    NodeId target;
    EventKind kind;
};

/// Single-threaded discrete-event kernel.
///
/// Events execute in (fire_time, sequence) order; sequence is the insertion
/// counter, so equal-time events run FIFO. Cancelled events are dropped
/// lazily when they reach the head of the queue.
class Engine
{
public:
    using Action = std::function<void()>;
    using Observer = std::function<void(const EventRecord &)>;

    SimTime now() const { return now_; }

    /// Throws ContractViolation if `at` precedes the current clock.
    EventHandle schedule(SimTime at, EventKind kind, NodeId target, Action action);

    EventHandle schedule_in(SimTime delay, EventKind kind, NodeId target, Action action)
    {
        return schedule(now_ + delay, kind, target, std::move(action));
    }

    /// Returns false if the event already ran or was cancelled.
    bool cancel(EventHandle handle);

    bool is_pending(EventHandle handle) const { return actions_.contains(handle.sequence); }

    /// Executes every event with fire_time <= end_time, then sets the clock
    /// to end_time.
    SimTime run_until(SimTime end_time);

    std::size_t pending_count() const { return actions_.size(); }
    std::uint64_t executed_count() const { return executed_; }

    void set_observer(Observer observer) { observer_ = std::move(observer); }

private:
    struct Key
    {
        SimTime fire_time;
        std::uint64_t sequence;

        friend bool operator>(const Key &a, const Key &b)
        {
            return a.fire_time != b.fire_time ? a.fire_time > b.fire_time : a.sequence > b.sequence;
        }
    };

    struct Pending
    {
        Action action;
        NodeId target;
        EventKind kind;
    };

    SimTime now_{0};
    std::uint64_t next_sequence_ = 1;
    std::uint64_t executed_ = 0;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue_;
    std::unordered_map<std::uint64_t, Pending> actions_;
    Observer observer_;
};

} // namespace rplsim
