#include "rplsim/rpl.hpp"

#include <algorithm>

namespace rplsim {

NodeState make_sink(NodeId id, Position position)
{
    NodeState node;
    node.id = id;
    node.position = position;
    node.role = NodeRole::Sink;
    node.rank = kRootRank;
    node.lowest_rank = kRootRank;
    node.path_cost = 0;
    return node;
}

NodeState make_sensor(NodeId id, Position position, TrafficClass cls)
{
    NodeState node;
    node.id = id;
    node.position = position;
    node.role = NodeRole::Sensor;
    node.traffic_class = cls;
    return node;
}

namespace {

void detach(NodeState &node)
{
    node.preferred_parent.reset();
    node.rank = kInfiniteRank;
    node.path_cost = kMaxPathCost;
    node.lowest_rank = kInfiniteRank;
    node.parent_failures = 0;
    node.candidate_parents.clear();
}

CandidateView view_of(const NodeState &node, const Candidate &c)
{
    auto link = node.link_stats.find(c.id);
    return CandidateView{c.id, c.advertised_rank, c.advertised_cost,
                         link == node.link_stats.end() ? nullptr : &link->second};
}

} // namespace

RouteChange reselect_parent(NodeState &node, const ObjectiveFunction &of, const RplConfig &cfg, SimTime now)
{
    RouteChange change;
    if (node.is_sink())
        return change;

    const std::optional<NodeId> old_parent = node.preferred_parent;
    const Rank old_rank = node.rank;

    std::erase_if(node.candidate_parents, [&](const auto &entry) {
        const Candidate &c = entry.second;
        return c.id != old_parent && now - c.last_heard > cfg.parent_expiry;
    });

    std::vector<CandidateView> eligible;
    eligible.reserve(node.candidate_parents.size());
    for (const auto &[id, c] : node.candidate_parents) {
        if (id == old_parent || c.advertised_rank < node.rank)
            eligible.push_back(view_of(node, c));
    }

    std::optional<RouteMetric> metric;
    const std::optional<NodeId> chosen = of.select(eligible, old_parent);
    if (chosen)
        metric = of.evaluate(view_of(node, node.candidate_parents.at(*chosen)));

    const bool too_deep = metric && old_parent && node.lowest_rank != kInfiniteRank &&
                          std::uint32_t{metric->rank} > std::uint32_t{node.lowest_rank} + cfg.max_rank_increase;
    if (!metric || too_deep) {
        if (old_parent) {
            detach(node);
            change.detached = true;
            change.parent_changed = true;
            change.rank_changed = true;
        }
        return change;
    }

    if (chosen != old_parent)
        node.parent_failures = 0;
    node.preferred_parent = chosen;
    node.rank = metric->rank;
    node.path_cost = metric->cost;
    node.lowest_rank = std::min(node.lowest_rank, node.rank);

    change.joined = !old_parent.has_value();
    change.parent_changed = chosen != old_parent;
    change.rank_changed = dag_rank(old_rank) != dag_rank(node.rank);
    return change;
}

RouteChange on_dio_received(NodeState &node, const DioMessage &dio, const ObjectiveFunction &of,
                            const RplConfig &cfg, SimTime now)
{
    if (node.is_sink() || dio.sender == node.id)
        return {};

    if (dio.advertised_rank == kInfiniteRank) {
        if (node.candidate_parents.erase(dio.sender) == 0)
            return {};
    } else {
        Candidate &c = node.candidate_parents[dio.sender];
        c.id = dio.sender;
        c.advertised_rank = dio.advertised_rank;
        c.advertised_cost = of.kind() == ObjectiveKind::MrhofEtx ? dio.path_cost : kMaxPathCost;
        c.last_heard = now;
    }
    return reselect_parent(node, of, cfg, now);
}

RouteChange on_unicast_result(NodeState &node, NodeId neighbor, UnicastResult result, unsigned max_transmissions,
                              const ObjectiveFunction &of, const RplConfig &cfg, SimTime now)
{
    auto [it, inserted] = node.link_stats.try_emplace(neighbor);
    if (inserted) {
        it->second.neighbor = neighbor;
        it->second.etx_estimate = cfg.etx.initial_guess;
    }
    it->second = etx_update(it->second, std::max(result.attempts_used, 1u), result.success, max_transmissions,
                            cfg.etx, now);

    if (result.success) {
        if (auto c = node.candidate_parents.find(neighbor); c != node.candidate_parents.end())
            c->second.last_heard = now;
    }
    if (node.preferred_parent == neighbor) {
        if (result.success) {
            node.parent_failures = 0;
        } else if (++node.parent_failures >= cfg.parent_failure_limit) {
            node.candidate_parents.erase(neighbor);
            node.parent_failures = 0;
        }
    }
    return reselect_parent(node, of, cfg, now);
}

DioMessage make_dio(const NodeState &node, ObjectiveKind objective)
{
    DioMessage dio;
    dio.sender = node.id;
    dio.advertised_rank = node.rank;
    dio.objective = objective;
    if (node.is_sink())
        dio.path_cost = 0;
    else
        dio.path_cost = objective == ObjectiveKind::MrhofEtx ? node.path_cost : kMaxPathCost;
    return dio;
}

std::variant<NodeId, DropCause> forward_data(const NodeState &node, const DataPacket &packet, unsigned ttl)
{
    if (node.is_sink())
        throw ContractViolation("forward_data called on the sink");
    if (packet.hops >= ttl)
        return DropCause::Ttl;
    if (!node.preferred_parent)
        return DropCause::NoRoute;
    return *node.preferred_parent;
}

bool is_routing_tree(std::span<const NodeState> nodes)
{
    const std::size_t n = nodes.size();
    std::size_t sinks = 0;
    for (const NodeState &node : nodes) {
        if (node.is_sink()) {
            ++sinks;
            if (node.preferred_parent)
                return false;
        }
    }
    if (sinks != 1)
        return false;

    for (const NodeState &node : nodes) {
        if (node.is_sink() || !node.joined())
            continue;
        const NodeState *cursor = &node;
        std::size_t steps = 0;
        while (!cursor->is_sink()) {
            if (!cursor->preferred_parent || *cursor->preferred_parent >= n || steps >= n - 1)
                return false;
            const NodeState &parent = nodes[*cursor->preferred_parent];
            if (!parent.joined())
                return false;
            cursor = &parent;
            ++steps;
        }
    }
    return true;
}

RplNetwork::RplNetwork(Engine &engine, Mac &mac, std::vector<NodeState> nodes, RplConfig cfg,
                       std::uint64_t master_seed, PacketTracker &packets, unsigned max_transmissions)
    : engine_(engine), mac_(mac), nodes_(std::move(nodes)), cfg_(std::move(cfg)),
      objective_(make_objective(cfg_.objective, cfg_.etx)), packets_(packets), max_transmissions_(max_transmissions)
{
    runtime_.reserve(nodes_.size());
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].id != id)
            throw ContractViolation("node ids must equal their index");
        runtime_.emplace_back(derive_stream(master_seed, StreamPurpose::ProtocolJitter, id));
    }
    mac_.set_receive_handler([this](NodeId at, const Frame &frame) { receive(at, frame); });
}

void RplNetwork::start()
{
    for (NodeState &node : nodes_) {
        if (node.is_sink())
            trickle_reset(node.id);
        else if (!node.joined())
            arm_dis_timer(node.id);
    }
}

void RplNetwork::originate(NodeId id, TrafficClass cls, bool counted)
{
    NodeState &node = nodes_.at(id);
    if (node.is_sink())
        throw ContractViolation("the sink does not originate traffic");
    DataPacket packet;
    packet.id = packets_.create(cls, engine_.now(), counted);
    packet.source = id;
    packet.traffic_class = cls;
    packet.created = engine_.now();
    if (!node.joined()) {
        packets_.copy_destroyed(packet.id, DropCause::NoRoute);
        return;
    }
    enqueue(id, packet);
}

void RplNetwork::receive(NodeId at, const Frame &frame)
{
    if (const auto *dio = std::get_if<DioMessage>(&frame.payload))
        handle_dio(at, *dio);
    else if (std::holds_alternative<DisMessage>(frame.payload))
        handle_dis(at);
    else if (const auto *data = std::get_if<DataPacket>(&frame.payload))
        handle_data(at, *data);
}

void RplNetwork::handle_dio(NodeId at, const DioMessage &dio)
{
    NodeState &node = nodes_[at];
    const RouteChange change = on_dio_received(node, dio, *objective_, cfg_, engine_.now());
    if (change.inconsistent() || change.joined || change.detached)
        apply(at, change);
    else if (node.trickle.running)
        trickle_hear_consistent(node.trickle);
}

void RplNetwork::handle_dis(NodeId at)
{
    if (nodes_[at].joined())
        trickle_reset(at);
}

void RplNetwork::handle_data(NodeId at, DataPacket packet)
{
    packets_.copy_created(packet.id);
    ++packet.hops;
    if (nodes_[at].is_sink()) {
        packets_.copy_delivered(packet.id, packet.hops, engine_.now());
        return;
    }
    enqueue(at, packet);
}

void RplNetwork::apply(NodeId id, const RouteChange &change)
{
    if (change.joined) {
        membership_.push_back({engine_.now(), id, true});
        engine_.cancel(runtime_[id].dis_timer);
    }
    if (change.detached) {
        membership_.push_back({engine_.now(), id, false});
        // advertise the infinite rank right away, then keep poisoning on
        // the trickle schedule until rejoined
        runtime_[id].dio_pending = true;
        arm_dis_timer(id);
    }
    if (change.inconsistent() || change.joined || change.detached)
        trickle_reset(id);
    pump(id);
}

void RplNetwork::trickle_reset(NodeId id)
{
    TrickleState &state = nodes_[id].trickle;
    if (state.running && state.current_interval == cfg_.trickle.i_min)
        return;
    rplsim::trickle_reset(state, cfg_.trickle, engine_.now(), runtime_[id].jitter);
    trickle_arm(id);
}

void RplNetwork::trickle_arm(NodeId id)
{
    Runtime &rt = runtime_[id];
    const TrickleState &state = nodes_[id].trickle;
    engine_.cancel(rt.trickle_fire);
    engine_.cancel(rt.trickle_end);
    rt.trickle_fire = engine_.schedule(state.fire_at, EventKind::TimerFire, id, [this, id] {
        if (trickle_should_transmit(nodes_[id].trickle, cfg_.trickle)) {
            runtime_[id].dio_pending = true;
            pump(id);
        }
    });
    rt.trickle_end = engine_.schedule(state.interval_start + state.current_interval, EventKind::TimerFire, id,
                                      [this, id] {
                                          trickle_next_interval(nodes_[id].trickle, cfg_.trickle, engine_.now(),
                                                                runtime_[id].jitter);
                                          trickle_arm(id);
                                      });
}

void RplNetwork::arm_dis_timer(NodeId id)
{
    Runtime &rt = runtime_[id];
    engine_.cancel(rt.dis_timer);
    const SimTime jitter{static_cast<std::int64_t>(rt.jitter.uniform_int(0, 499'999))};
    rt.dis_timer = engine_.schedule_in(cfg_.dis_period + jitter, EventKind::TimerFire, id, [this, id] {
        if (nodes_[id].joined())
            return;
        runtime_[id].dis_pending = true;
        pump(id);
        arm_dis_timer(id);
    });
}

void RplNetwork::enqueue(NodeId id, DataPacket packet)
{
    Runtime &rt = runtime_[id];
    if (rt.queue.size() >= cfg_.queue_capacity) {
        packets_.copy_destroyed(packet.id, DropCause::QueueOverflow);
        return;
    }
    rt.queue.push_back(packet);
    pump(id);
}

Frame RplNetwork::data_frame(NodeId id, const DataPacket &packet)
{
    Frame frame;
    frame.type = FrameType::Data;
    frame.src = id;
    frame.bytes = mac_.config().data_header_bytes + mac_.config().data_payload_bytes;
    frame.payload = packet;
    return frame;
}

void RplNetwork::pump(NodeId id)
{
    if (mac_.busy(id))
        return;
    Runtime &rt = runtime_[id];
    NodeState &node = nodes_[id];

    if (rt.dis_pending) {
        rt.dis_pending = false;
        if (!node.joined()) {
            Frame frame;
            frame.type = FrameType::Dis;
            frame.bytes = mac_.config().control_frame_bytes;
            frame.payload = DisMessage{id};
            mac_.broadcast(id, std::move(frame), [this, id](bool sent) {
                if (sent)
                    ++dis_sent_;
                pump(id);
            });
            return;
        }
    }

    if (rt.dio_pending) {
        rt.dio_pending = false;
        Frame frame;
        frame.type = FrameType::Dio;
        frame.bytes = mac_.config().control_frame_bytes;
        frame.payload = make_dio(node, cfg_.objective);
        mac_.broadcast(id, std::move(frame), [this, id](bool sent) {
            if (sent)
                ++dio_sent_;
            pump(id);
        });
        return;
    }

    while (!rt.queue.empty()) {
        const DataPacket packet = rt.queue.front();
        rt.queue.pop_front();
        const auto decision = forward_data(node, packet, cfg_.ttl);
        if (const auto *cause = std::get_if<DropCause>(&decision)) {
            packets_.copy_destroyed(packet.id, *cause);
            continue;
        }
        const NodeId next_hop = std::get<NodeId>(decision);
        mac_.unicast(id, next_hop, data_frame(id, packet), [this, id, next_hop, pid = packet.id](UnicastResult r) {
            if (r.success)
                packets_.copy_released(pid);
            else
                packets_.copy_destroyed(pid, DropCause::MacFailure);
            const RouteChange change =
                on_unicast_result(nodes_[id], next_hop, r, max_transmissions_, *objective_, cfg_, engine_.now());
            apply(id, change);
            pump(id);
        });
        return;
    }
}

} // namespace rplsim
