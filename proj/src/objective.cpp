#include "rplsim/objective.hpp"

#include <algorithm>
#include <vector>

namespace rplsim {

namespace {

constexpr std::uint32_t kRankLimit = kInfiniteRank;

Rank saturate_rank(std::uint32_t value)
{
    return static_cast<Rank>(std::min(value, kRankLimit));
}

} // namespace

std::optional<Rank> of0_rank(Rank parent_advertised_rank)
{
    if (parent_advertised_rank == kInfiniteRank)
        return std::nullopt;
    return saturate_rank(std::uint32_t{parent_advertised_rank} + kMinHopRankIncrease);
}

std::optional<NodeId> of0_select_parent(std::span<const RankedCandidate> candidates, std::optional<NodeId> current)
{
    const RankedCandidate *best = nullptr;
    const RankedCandidate *kept = nullptr;
    for (const RankedCandidate &c : candidates) {
        if (c.advertised_rank == kInfiniteRank)
            continue;
        if (!best || c.advertised_rank < best->advertised_rank ||
            (c.advertised_rank == best->advertised_rank && c.id < best->id))
            best = &c;
        if (current && c.id == *current)
            kept = &c;
    }
    if (!best)
        return std::nullopt;
    if (kept && !(best->advertised_rank < kept->advertised_rank))
        return kept->id;
    return best->id;
}

LinkStats etx_update(LinkStats stats, unsigned attempts_used, bool success, unsigned max_transmissions,
                     const EtxParams &params, SimTime now)
{
    if (attempts_used == 0)
        throw ContractViolation("etx_update: attempts_used must be at least 1");

    const std::uint64_t sample = success ? std::uint64_t{attempts_used} * kEtxScale
                                         : std::uint64_t{max_transmissions} * params.failure_penalty_factor * kEtxScale;
    const std::uint64_t old_weight = params.old_weight_percent;
    std::uint64_t next = (old_weight * stats.etx_estimate + (100 - old_weight) * sample) / 100;
    next = std::clamp<std::uint64_t>(next, kEtxScale, kMaxPathCost);

    stats.etx_estimate = static_cast<PathCost>(next);
    stats.tx_attempt_count += attempts_used;
    if (success)
        ++stats.tx_success_count;
    stats.last_updated = now;
    return stats;
}

PathCost mrhof_path_cost(PathCost parent_cost, const LinkStats &link)
{
    if (parent_cost >= kMaxPathCost)
        return kMaxPathCost;
    const std::uint32_t sum = std::uint32_t{parent_cost} + link.etx_estimate;
    return static_cast<PathCost>(std::min<std::uint32_t>(sum, kMaxPathCost));
}

Rank mrhof_rank(Rank parent_advertised_rank, PathCost path_cost)
{
    if (parent_advertised_rank == kInfiniteRank || path_cost == kMaxPathCost)
        return kInfiniteRank;
    const std::uint32_t floor = std::uint32_t{parent_advertised_rank} + kMinHopRankIncrease;
    const std::uint32_t scaled = std::uint32_t{path_cost} * (kMinHopRankIncrease / kEtxScale);
    return saturate_rank(std::max(floor, scaled));
}

std::optional<NodeId> mrhof_select_parent(std::span<const CostedCandidate> candidates, std::optional<NodeId> current)
{
    const CostedCandidate *best = nullptr;
    const CostedCandidate *kept = nullptr;
    for (const CostedCandidate &c : candidates) {
        if (c.path_cost >= kMaxPathCost)
            continue;
        if (!best || c.path_cost < best->path_cost || (c.path_cost == best->path_cost && c.id < best->id))
            best = &c;
        if (current && c.id == *current)
            kept = &c;
    }
    if (!best)
        return std::nullopt;
    if (kept && std::uint32_t{best->path_cost} + kParentSwitchThreshold > kept->path_cost)
        return kept->id;
    return best->id;
}

namespace {

class Of0 final : public ObjectiveFunction
{
public:
    ObjectiveKind kind() const override { return ObjectiveKind::Of0; }

    std::optional<RouteMetric> evaluate(const CandidateView &candidate) const override
    {
        const auto rank = of0_rank(candidate.advertised_rank);
        if (!rank || *rank == kInfiniteRank)
            return std::nullopt;
        return RouteMetric{*rank, kMaxPathCost};
    }

    std::optional<NodeId> select(std::span<const CandidateView> candidates,
                                 std::optional<NodeId> current) const override
    {
        std::vector<RankedCandidate> ranked;
        ranked.reserve(candidates.size());
        for (const CandidateView &c : candidates) {
            if (evaluate(c))
                ranked.push_back({c.id, c.advertised_rank});
        }
        return of0_select_parent(ranked, current);
    }
};

class MrhofEtx final : public ObjectiveFunction
{
public:
    explicit MrhofEtx(const EtxParams &params) : params_(params) {}

    ObjectiveKind kind() const override { return ObjectiveKind::MrhofEtx; }

    std::optional<RouteMetric> evaluate(const CandidateView &candidate) const override
    {
        if (candidate.advertised_rank == kInfiniteRank || candidate.advertised_cost >= kMaxPathCost)
            return std::nullopt;
        LinkStats link;
        link.etx_estimate = candidate.link ? candidate.link->etx_estimate : params_.initial_guess;
        const PathCost cost = mrhof_path_cost(candidate.advertised_cost, link);
        const Rank rank = mrhof_rank(candidate.advertised_rank, cost);
        if (cost >= kMaxPathCost || rank == kInfiniteRank)
            return std::nullopt;
        return RouteMetric{rank, cost};
    }

    std::optional<NodeId> select(std::span<const CandidateView> candidates,
                                 std::optional<NodeId> current) const override
    {
        std::vector<CostedCandidate> costed;
        costed.reserve(candidates.size());
        for (const CandidateView &c : candidates) {
            if (auto metric = evaluate(c))
                costed.push_back({c.id, metric->cost});
        }
        return mrhof_select_parent(costed, current);
    }

private:
    EtxParams params_;
};

} // namespace

std::unique_ptr<ObjectiveFunction> make_objective(ObjectiveKind kind, const EtxParams &params)
{
    if (kind == ObjectiveKind::MrhofEtx)
        return std::make_unique<MrhofEtx>(params);
    return std::make_unique<Of0>();
}

} // namespace rplsim
