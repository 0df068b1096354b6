#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rplsim/energy.hpp"
#include "rplsim/types.hpp"

namespace rplsim {

enum class DropCause : std::uint8_t
{
    NoRoute,
    MacFailure,
    QueueOverflow,
    Ttl,
};

inline constexpr std::size_t kDropCauseCount = 4;

std::string_view to_string(DropCause cause);

struct PacketCounters
{
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::array<std::uint64_t, kDropCauseCount> drops{};
    /// Still travelling when the run ended.
    std::uint64_t pending = 0;

    std::uint64_t dropped() const;
    std::uint64_t drops_of(DropCause cause) const { return drops[static_cast<std::size_t>(cause)]; }

    /// delivered/sent, absent when nothing was sent.
    std::optional<double> pdr() const;

    PacketCounters &operator+=(const PacketCounters &other);
};

struct PacketOutcome
{
    bool delivered = false;
    DropCause cause = DropCause::NoRoute; ///< meaningful when !delivered
    unsigned hops = 0;
    SimTime latency{0};

    static PacketOutcome delivery(unsigned hops, SimTime latency) { return {true, DropCause::NoRoute, hops, latency}; }
    static PacketOutcome drop(DropCause cause) { return {false, cause, 0, SimTime{0}}; }
};

/// Metrics for one simulation run.
struct MetricsReport
{
    std::array<PacketCounters, kTrafficClassCount> per_class{};

    std::vector<double> node_power_mw; ///< indexed by node id; sink included
    double avg_power_mw = 0.0;         ///< mean over sensors
    double total_energy_mj = 0.0;      ///< sum over sensors
    std::optional<double> convergence_s;
    std::uint64_t dio_count = 0;
    std::uint64_t dis_count = 0;
    std::uint64_t delivered_hops = 0;
    SimTime delivered_latency{0};

    /// Counts a packet generated as `cls` as sent.
    void record_sent(TrafficClass cls) { ++per_class[index_of(cls)].sent; }

    /// Records the final fate of a packet.
    void record_packet(TrafficClass cls, const PacketOutcome &outcome);

    PacketCounters total() const;
    std::optional<double> pdr_total() const { return total().pdr(); }
    std::optional<double> pdr(TrafficClass cls) const { return per_class[index_of(cls)].pdr(); }
};

/// Resolves the fate of packets that may exist as several copies at once.
///
/// A MAC exchange whose ACK is lost leaves a live copy at the receiver while
/// the sender gives up, so a packet is resolved as delivered when its first
/// copy reaches the sink, or dropped (with the cause of the last copy lost)
/// once no copy remains.
class PacketTracker
{
public:
    explicit PacketTracker(MetricsReport &report) : report_(report) {}

    /// Registers a new packet with one live copy. Uncounted packets are
    /// tracked but never enter the report.
    std::uint64_t create(TrafficClass cls, SimTime created, bool counted);

    void copy_created(std::uint64_t packet);
    void copy_delivered(std::uint64_t packet, unsigned hops, SimTime now);
    void copy_destroyed(std::uint64_t packet, DropCause cause);
    /// A holder handed its copy on; if it was the last copy the packet is
    /// dropped with the most recent loss cause.
    void copy_released(std::uint64_t packet);

    bool resolved(std::uint64_t packet) const;
    std::size_t live_packets() const { return live_.size(); }

    /// Counts everything unresolved as pending.
    void finalize();

private:
    struct Entry
    {
        TrafficClass cls;
        SimTime created;
        bool counted;
        int live_copies;
        DropCause last_cause;
    };

    void release(std::unordered_map<std::uint64_t, Entry>::iterator it);

    MetricsReport &report_;
    std::uint64_t next_id_ = 1;
    std::unordered_map<std::uint64_t, Entry> live_;
};

/// A change in a node's DODAG membership.
struct MembershipChange
{
    SimTime time;
    NodeId node;
    bool joined;
};

/// Earliest time at which all `sensor_count` sensors are joined at once,
/// replaying the membership log in order. Absent if never reached.
std::optional<SimTime> convergence_time(std::span<const MembershipChange> log, std::size_t sensor_count);

} // namespace rplsim
