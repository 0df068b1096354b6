#pragma once

#include <memory>
#include <optional>
#include <span>

#include "rplsim/messages.hpp"

namespace rplsim {

/// Per-neighbor link quality fed by unicast outcomes.
struct LinkStats
{
    NodeId neighbor = kNoNode;
    PathCost etx_estimate = 2 * kEtxScale;
    std::uint32_t tx_attempt_count = 0;
    std::uint32_t tx_success_count = 0;
    SimTime last_updated{0};
};

struct EtxParams
{
    PathCost initial_guess = 2 * kEtxScale;
    unsigned old_weight_percent = 90;
    /// Failed exchange sample, in multiples of max_transmissions.
    unsigned failure_penalty_factor = 2;
};

/// OF0 rank through a parent: parent + MinHopRankIncrease, saturating at
/// kInfiniteRank. Absent when the parent itself is at infinite rank.
std::optional<Rank> of0_rank(Rank parent_advertised_rank);

struct RankedCandidate
{
    NodeId id;
    Rank advertised_rank;
};

/// Lowest advertised rank wins, lowest id breaks ties. A current parent that
/// is still a candidate is kept unless another is strictly better.
std::optional<NodeId> of0_select_parent(std::span<const RankedCandidate> candidates,
                                        std::optional<NodeId> current = std::nullopt);

/// EWMA update of a link's ETX from one unicast exchange.
LinkStats etx_update(LinkStats stats, unsigned attempts_used, bool success, unsigned max_transmissions,
                     const EtxParams &params = {}, SimTime now = SimTime{0});

/// Parent cost plus link ETX, saturating at kMaxPathCost.
PathCost mrhof_path_cost(PathCost parent_cost, const LinkStats &link);

/// Rank that accompanies an MRHOF path: the larger of the OF0 floor over the
/// parent and the cost in rank units.
Rank mrhof_rank(Rank parent_advertised_rank, PathCost path_cost);

/// Path-cost difference required before leaving the current parent.
inline constexpr PathCost kParentSwitchThreshold = 192;

struct CostedCandidate
{
    NodeId id;
    PathCost path_cost; ///< cost through this candidate
};

std::optional<NodeId> mrhof_select_parent(std::span<const CostedCandidate> candidates,
                                          std::optional<NodeId> current = std::nullopt);

/// A neighbor's last advertisement together with our link to it.
struct CandidateView
{
    NodeId id;
    Rank advertised_rank;
    PathCost advertised_cost;
    const LinkStats *link; ///< null when no link statistics exist yet
};

/// Rank and cost a node would hold through one candidate.
struct RouteMetric
{
    Rank rank;
    PathCost cost;
};

/// Strategy used by the routing layer; one instance per run.
class ObjectiveFunction
{
public:
    virtual ~ObjectiveFunction() = default;

    virtual ObjectiveKind kind() const = 0;

    /// Absent when the candidate cannot be used (infinite rank, saturated cost).
    virtual std::optional<RouteMetric> evaluate(const CandidateView &candidate) const = 0;

    virtual std::optional<NodeId> select(std::span<const CandidateView> candidates,
                                         std::optional<NodeId> current) const = 0;
};

std::unique_ptr<ObjectiveFunction> make_objective(ObjectiveKind kind, const EtxParams &params = {});

} // namespace rplsim
