#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rplsim/energy.hpp"
#include "rplsim/medium.hpp"
#include "rplsim/random.hpp"
#include "rplsim/rpl.hpp"

namespace rplsim {

enum class TopologyKind : std::uint8_t
{
    Random,
    Grid,
};

std::string_view to_string(TopologyKind kind);
std::string_view to_string(ObjectiveKind kind);

enum class JitterMode : std::uint8_t
{
    UniformJitter, ///< gap ~ U[T/2, 3T/2]
    Fixed,         ///< gap == T
};

struct TrafficProfile
{
    TrafficClass cls;
    SimTime mean_interval;
    JitterMode jitter;
};

/// Healthcare profiles: ICU sensors every ~10 s and ~20 s, periodic vitals
/// every 5 min, room temperature about hourly.
std::array<TrafficProfile, kTrafficClassCount> default_traffic_profiles();

inline constexpr std::array<TrafficClass, kTrafficClassCount> kAllTrafficClasses{
    TrafficClass::HighCritical, TrafficClass::Critical, TrafficClass::LowCritical, TrafficClass::Temperature};

struct ScenarioConfig
{
    std::string scenario_id; ///< empty: derived from the dimensions
    std::size_t node_count = 20; ///< sink included
    TopologyKind topology = TopologyKind::Random;
    double area_side_m = 300.0;
    double grid_spacing_m = 60.0;
    ObjectiveKind objective = ObjectiveKind::Of0;
    std::uint64_t seed = 1;

    SimTime duration{900'000'000};
    SimTime warmup{60'000'000};
    /// Applications stop this long before the end so packets can settle.
    SimTime drain{10'000'000};

    /// Classes handed out to sensors, in block order.
    std::vector<TrafficClass> traffic_mix{kAllTrafficClasses.begin(), kAllTrafficClasses.end()};
    std::array<TrafficProfile, kTrafficClassCount> traffic = default_traffic_profiles();

    MediumConfig medium;
    RplConfig rpl;
    EnergyModel energy;

    double rx_success_ratio() const { return medium.rx_success_ratio; }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    std::string id() const;
};

struct Topology
{
    std::vector<Position> positions; ///< index == node id
    NodeId sink = 0;
};

/// True when the unit-disk graph over `positions` is connected.
bool is_connected(std::span<const Position> positions, const MediumConfig &medium);

/// Sink at the centre of the square, sensors uniform over it; the whole
/// layout is redrawn until connected, at most 1000 times.
Topology generate_random_topology(const ScenarioConfig &cfg, RandomStream &stream);

/// ceil(sqrt(n)) columns filled row-major; the sink takes the cell nearest
/// the centroid of the occupied cells.
Topology generate_grid_topology(const ScenarioConfig &cfg);

Topology generate_topology(const ScenarioConfig &cfg);

/// Sensors (in the given id order) are split into contiguous blocks, one per
/// class of `mix`, sizes differing by at most one with the extras going to
/// the earlier blocks.
std::vector<TrafficClass> assign_traffic_classes(std::span<const NodeId> sensors, std::span<const TrafficClass> mix);

SimTime next_send_time(const TrafficProfile &profile, SimTime now, RandomStream &stream);

} // namespace rplsim
