#pragma once

#include <cstdint>

#include "rplsim/types.hpp"

namespace rplsim {

/// DODAG rank in 1/256 hop units.
using Rank = std::uint16_t;

inline constexpr Rank kMinHopRankIncrease = 256;
inline constexpr Rank kRootRank = kMinHopRankIncrease;
inline constexpr Rank kInfiniteRank = 0xFFFF;

/// Integer hop depth used when comparing ranks for consistency.
constexpr Rank dag_rank(Rank rank)
{
    return rank / kMinHopRankIncrease;
}

/// Additive ETX path metric, scale 128 (128 == one expected transmission).
using PathCost = std::uint16_t;

inline constexpr PathCost kEtxScale = 128;
inline constexpr PathCost kMaxPathCost = 0xFFFF;

enum class ObjectiveKind : std::uint8_t
{
    Of0,
    MrhofEtx,
};

struct DioMessage
{
    NodeId sender = kNoNode;
    Rank advertised_rank = kInfiniteRank;
    std::uint8_t dodag_version = 0;
    ObjectiveKind objective = ObjectiveKind::Of0;
    PathCost path_cost = kMaxPathCost; ///< only meaningful under MRHOF
};

struct DisMessage
{
    NodeId sender = kNoNode;
};

struct DataPacket
{
    std::uint64_t id = 0;
    NodeId source = kNoNode;
    TrafficClass traffic_class = TrafficClass::HighCritical;
    SimTime created{0};
    unsigned hops = 0;
};

} // namespace rplsim
