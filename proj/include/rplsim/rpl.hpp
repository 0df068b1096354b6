#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rplsim/engine.hpp"
#include "rplsim/medium.hpp"
#include "rplsim/objective.hpp"
#include "rplsim/telemetry.hpp"
#include "rplsim/trickle.hpp"

namespace rplsim {

struct RplConfig
{
    ObjectiveKind objective = ObjectiveKind::Of0;
    TrickleConfig trickle;
    EtxParams etx;
    SimTime dis_period{5'000'000};
    /// Non-preferred candidates unheard for this long are forgotten.
    SimTime parent_expiry{100'000'000};
    std::size_t queue_capacity = 8;
    unsigned ttl = 16;
    /// How far above its lowest advertised rank a node may drift before it
    /// detaches (DAGMaxRankIncrease).
    unsigned max_rank_increase = 7 * kMinHopRankIncrease;
    /// Consecutive failed exchanges after which the preferred parent is dropped.
    unsigned parent_failure_limit = 3;
};

enum class NodeRole : std::uint8_t
{
    Sink,
    Sensor,
};

struct Candidate
{
    NodeId id = kNoNode;
    Rank advertised_rank = kInfiniteRank;
    PathCost advertised_cost = kMaxPathCost;
    SimTime last_heard{0};
};

struct NodeState
{
    NodeId id = kNoNode;
    Position position;
    NodeRole role = NodeRole::Sensor;
    TrafficClass traffic_class = TrafficClass::HighCritical;

    Rank rank = kInfiniteRank;
    PathCost path_cost = kMaxPathCost;
    std::optional<NodeId> preferred_parent;
    std::map<NodeId, Candidate> candidate_parents;
    std::map<NodeId, LinkStats> link_stats;
    TrickleState trickle;

    Rank lowest_rank = kInfiniteRank;
    unsigned parent_failures = 0;

    bool is_sink() const { return role == NodeRole::Sink; }
    bool joined() const { return is_sink() || preferred_parent.has_value(); }
};

NodeState make_sink(NodeId id, Position position);
NodeState make_sensor(NodeId id, Position position, TrafficClass cls);

/// What a routing update did to a node.
struct RouteChange
{
    bool parent_changed = false;
    /// Integer hop depth (rank / MinHopRankIncrease) moved.
    bool rank_changed = false;
    bool joined = false;
    bool detached = false;

    bool inconsistent() const { return parent_changed || rank_changed; }
};

/// Re-runs parent selection over the candidate set.
///
/// A candidate is eligible when its advertised rank is below the node's
/// current rank; the current parent stays eligible so the node can follow its
/// rank. Losing every option, or drifting more than max_rank_increase above
/// the lowest rank held, detaches the node and clears its candidates.
RouteChange reselect_parent(NodeState &node, const ObjectiveFunction &of, const RplConfig &cfg, SimTime now);

/// Folds a received DIO into the candidate set and re-selects. An infinite
/// advertised rank removes the sender.
RouteChange on_dio_received(NodeState &node, const DioMessage &dio, const ObjectiveFunction &of,
                            const RplConfig &cfg, SimTime now);

/// Updates link statistics after a unicast exchange with `neighbor`.
RouteChange on_unicast_result(NodeState &node, NodeId neighbor, UnicastResult result, unsigned max_transmissions,
                              const ObjectiveFunction &of, const RplConfig &cfg, SimTime now);

/// The DIO this node would send right now.
DioMessage make_dio(const NodeState &node, ObjectiveKind objective);

/// Next hop for an upward data packet, or why it cannot be forwarded.
std::variant<NodeId, DropCause> forward_data(const NodeState &node, const DataPacket &packet, unsigned ttl);

/// True when the preferred-parent links of joined nodes form a tree rooted at
/// the sink: every joined sensor reaches the sink in at most n-1 steps
/// through joined nodes.
bool is_routing_tree(std::span<const NodeState> nodes);

/// Event-driven RPL upward routing over a Mac, one instance per run.
class RplNetwork
{
public:
    using MembershipObserver = std::function<void(const MembershipChange &)>;

    RplNetwork(Engine &engine, Mac &mac, std::vector<NodeState> nodes, RplConfig cfg, std::uint64_t master_seed,
               PacketTracker &packets, unsigned max_transmissions);

    /// Sink starts advertising; sensors arm their solicitation timers.
    void start();

    /// A sensor's application produced a packet.
    void originate(NodeId node, TrafficClass cls, bool counted);

    /// Handles a frame delivered to `at` by the MAC.
    void receive(NodeId at, const Frame &frame);

    std::span<const NodeState> nodes() const { return nodes_; }
    const NodeState &node(NodeId id) const { return nodes_.at(id); }
    const RplConfig &config() const { return cfg_; }

    std::uint64_t dio_sent() const { return dio_sent_; }
    std::uint64_t dis_sent() const { return dis_sent_; }
    std::span<const MembershipChange> membership_log() const { return membership_; }

private:
    struct Runtime
    {
        explicit Runtime(RandomStream stream) : jitter(std::move(stream)) {}

        RandomStream jitter;
        std::deque<DataPacket> queue;
        bool dio_pending = false;
        bool dis_pending = false;
        EventHandle trickle_fire;
        EventHandle trickle_end;
        EventHandle dis_timer;
    };

    void handle_dio(NodeId at, const DioMessage &dio);
    void handle_dis(NodeId at);
    void handle_data(NodeId at, DataPacket packet);
    void apply(NodeId id, const RouteChange &change);

    void trickle_reset(NodeId id);
    void trickle_arm(NodeId id);
    void arm_dis_timer(NodeId id);

    void enqueue(NodeId id, DataPacket packet);
    void pump(NodeId id);
    Frame data_frame(NodeId id, const DataPacket &packet);

    Engine &engine_;
    Mac &mac_;
    std::vector<NodeState> nodes_;
    std::vector<Runtime> runtime_;
    RplConfig cfg_;
    std::unique_ptr<ObjectiveFunction> objective_;
    PacketTracker &packets_;
    unsigned max_transmissions_;
    std::uint64_t dio_sent_ = 0;
    std::uint64_t dis_sent_ = 0;
    std::vector<MembershipChange> membership_;
};

} // namespace rplsim
