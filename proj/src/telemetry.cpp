#include "rplsim/telemetry.hpp"

#include <unordered_set>

namespace rplsim {

std::string_view to_string(DropCause cause)
{
    switch (cause) {
    case DropCause::NoRoute: return "no-route";
    case DropCause::MacFailure: return "mac-failure";
    case DropCause::QueueOverflow: return "queue-overflow";
    case DropCause::Ttl: return "ttl";
    }
    return "unknown";
}

std::uint64_t PacketCounters::dropped() const
{
    std::uint64_t sum = 0;
    for (auto d : drops)
        sum += d;
    return sum;
}

std::optional<double> PacketCounters::pdr() const
{
    if (sent == 0)
        return std::nullopt;
    return static_cast<double>(delivered) / static_cast<double>(sent);
}

PacketCounters &PacketCounters::operator+=(const PacketCounters &other)
{
    sent += other.sent;
    delivered += other.delivered;
    for (std::size_t i = 0; i < kDropCauseCount; ++i)
        drops[i] += other.drops[i];
    pending += other.pending;
    return *this;
}

void MetricsReport::record_packet(TrafficClass cls, const PacketOutcome &outcome)
{
    PacketCounters &c = per_class[index_of(cls)];
    if (outcome.delivered) {
        ++c.delivered;
        delivered_hops += outcome.hops;
        delivered_latency += outcome.latency;
    } else {
        ++c.drops[static_cast<std::size_t>(outcome.cause)];
    }
}

PacketCounters MetricsReport::total() const
{
    PacketCounters sum;
    for (const auto &c : per_class)
        sum += c;
    return sum;
}

std::uint64_t PacketTracker::create(TrafficClass cls, SimTime created, bool counted)
{
    const std::uint64_t id = next_id_++;
    live_.emplace(id, Entry{cls, created, counted, 1, DropCause::NoRoute});
    if (counted)
        report_.record_sent(cls);
    return id;
}

void PacketTracker::copy_created(std::uint64_t packet)
{
    auto it = live_.find(packet);
    if (it != live_.end())
        ++it->second.live_copies;
}

void PacketTracker::copy_delivered(std::uint64_t packet, unsigned hops, SimTime now)
{
    auto it = live_.find(packet);
    if (it == live_.end())
        return; // a duplicate of an already delivered packet
    if (it->second.counted)
        report_.record_packet(it->second.cls, PacketOutcome::delivery(hops, now - it->second.created));
    live_.erase(it);
}

void PacketTracker::copy_destroyed(std::uint64_t packet, DropCause cause)
{
    auto it = live_.find(packet);
    if (it == live_.end())
        return;
    it->second.last_cause = cause;
    release(it);
}

void PacketTracker::copy_released(std::uint64_t packet)
{
    auto it = live_.find(packet);
    if (it != live_.end())
        release(it);
}

void PacketTracker::release(std::unordered_map<std::uint64_t, Entry>::iterator it)
{
    if (--it->second.live_copies > 0)
        return;
    if (it->second.counted)
        report_.record_packet(it->second.cls, PacketOutcome::drop(it->second.last_cause));
    live_.erase(it);
}

bool PacketTracker::resolved(std::uint64_t packet) const
{
    return !live_.contains(packet);
}

void PacketTracker::finalize()
{
    for (const auto &[id, entry] : live_) {
        if (entry.counted)
            ++report_.per_class[index_of(entry.cls)].pending;
    }
    live_.clear();
}

std::optional<SimTime> convergence_time(std::span<const MembershipChange> log, std::size_t sensor_count)
{
    if (sensor_count == 0)
        return SimTime{0};
    std::unordered_set<NodeId> joined;
    for (const MembershipChange &change : log) {
        if (change.joined)
            joined.insert(change.node);
        else
            joined.erase(change.node);
        if (joined.size() == sensor_count)
            return change.time;
    }
    return std::nullopt;
}

} // namespace rplsim
