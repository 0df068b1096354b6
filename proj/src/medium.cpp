#include "rplsim/medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rplsim {

void MediumConfig::validate() const
{
    auto probability = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!(std::isfinite(tx_range_m) && tx_range_m > 0.0))
        throw ConfigError("must be a positive distance in meters", "tx_range");
    if (!probability(rx_success_ratio))
        throw ConfigError("must lie in [0, 1]", "rx_success_ratio");
    if (bitrate_bps == 0)
        throw ConfigError("must be positive", "bitrate");
    if (max_transmissions < 1)
        throw ConfigError("must be at least 1", "max_transmissions");
    if (ack_wait <= SimTime::zero())
        throw ConfigError("must be positive", "ack_wait");
    if (turnaround < SimTime::zero())
        throw ConfigError("must not be negative", "turnaround");
    if (backoff_unit <= SimTime::zero())
        throw ConfigError("must be positive", "backoff_unit");
    if (backoff_slots == 0 || backoff_slots > 1'000'000)
        throw ConfigError("must lie in [1, 1000000]", "backoff_slots");
    if (control_frame_bytes == 0 || data_header_bytes + data_payload_bytes == 0 || ack_frame_bytes == 0)
        throw ConfigError("frame sizes must be positive", "frame_bytes");
    for (const LinkRatio &link : link_ratios) {
        if (!probability(link.ratio))
            throw ConfigError("link ratio must lie in [0, 1]", "link_ratios");
        if (link.a == link.b)
            throw ConfigError("link endpoints must differ", "link_ratios");
    }
}

bool in_range(Position a, Position b, const MediumConfig &cfg)
{
    return distance(a, b) <= cfg.tx_range_m;
}

std::string_view to_string(FrameType type)
{
    switch (type) {
    case FrameType::Dio: return "dio";
    case FrameType::Dis: return "dis";
    case FrameType::Data: return "data";
    case FrameType::Ack: return "ack";
    }
    return "unknown";
}

Medium::Medium(Engine &engine, std::vector<Position> positions, MediumConfig cfg, RandomStream reception,
               EnergyMeter &energy)
    : engine_(engine), positions_(std::move(positions)), cfg_(std::move(cfg)), reception_(std::move(reception)),
      energy_(energy)
{
    cfg_.validate();
    const std::size_t n = positions_.size();
    if (energy_.node_count() != n)
        throw ContractViolation("energy meter sized for a different node count");

    adjacency_.assign(n * n, 0);
    neighbors_.resize(n);
    ratios_.assign(n * n, cfg_.rx_success_ratio);
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = 0; b < n; ++b) {
            if (a != b && in_range(positions_[a], positions_[b], cfg_)) {
                adjacency_[a * n + b] = 1;
                neighbors_[a].push_back(b);
            }
        }
    }
    for (const LinkRatio &link : cfg_.link_ratios) {
        if (link.a >= n || link.b >= n)
            throw ConfigError("link endpoint " + std::to_string(std::max(link.a, link.b)) + " out of range",
                              "link_ratios");
        ratios_[link.a * n + link.b] = link.ratio;
        ratios_[link.b * n + link.a] = link.ratio;
    }
}

double Medium::link_ratio(NodeId a, NodeId b) const
{
    return ratios_.at(a * positions_.size() + b);
}

SimTime Medium::airtime(std::uint32_t frame_bytes) const
{
    const std::uint64_t bits = (std::uint64_t{frame_bytes} + cfg_.phy_overhead_bytes) * 8;
    return SimTime{static_cast<std::int64_t>((bits * 1'000'000 + cfg_.bitrate_bps - 1) / cfg_.bitrate_bps)};
}

bool Medium::channel_busy(NodeId listener) const
{
    const SimTime now = engine_.now();
    for (const Transmission &tx : history_) {
        if (tx.start <= now && now < tx.end && (tx.sender == listener || adjacent(tx.sender, listener)))
            return true;
    }
    return false;
}

bool Medium::transmitting(NodeId node) const
{
    const SimTime now = engine_.now();
    return std::any_of(history_.begin(), history_.end(),
                       [&](const Transmission &tx) { return tx.sender == node && tx.start <= now && now < tx.end; });
}

void Medium::transmit(NodeId sender, Frame frame, EndHandler on_end)
{
    const SimTime now = engine_.now();
    prune(now);

    Transmission tx;
    tx.id = next_id_++;
    tx.sender = sender;
    tx.start = now;
    tx.end = now + airtime(frame.bytes);
    tx.receivers = neighbors_.at(sender);
    tx.frame = std::move(frame);
    longest_airtime_ = std::max(longest_airtime_, tx.end - tx.start);

    energy_.begin_tx(sender, now);
    for (NodeId r : tx.receivers)
        energy_.begin_listen(r, now);

    const std::uint64_t id = tx.id;
    const SimTime end = tx.end;
    history_.push_back(std::move(tx));
    engine_.schedule(end, EventKind::TxEnd, sender, [this, id, handler = std::move(on_end)] { finish(id, handler); });
}

Reception Medium::deliver(const Transmission &tx, NodeId receiver)
{
    if (receiver == tx.sender || !adjacent(tx.sender, receiver))
        throw ContractViolation("deliver: receiver not in range of sender");

    for (const Transmission &other : history_) {
        if (other.id == tx.id)
            continue;
        const bool audible = other.sender == receiver || adjacent(other.sender, receiver);
        if (audible && other.start < tx.end && tx.start < other.end)
            return Reception::LostCollision;
    }
    return reception_.bernoulli(link_ratio(tx.sender, receiver)) ? Reception::Delivered : Reception::LostRandom;
}

void Medium::finish(std::uint64_t id, const EndHandler &on_end)
{
    auto it = std::find_if(history_.begin(), history_.end(), [id](const Transmission &t) { return t.id == id; });
    if (it == history_.end())
        throw ContractViolation("transmission vanished before its end");
    // copy: the handler may start new transmissions and grow history_
    const Transmission tx = *it;
    const SimTime now = engine_.now();

    energy_.end_tx(tx.sender, now);
    for (NodeId r : tx.receivers)
        energy_.end_listen(r, now);

    std::vector<ReceptionOutcome> outcomes;
    outcomes.reserve(tx.receivers.size());
    for (NodeId r : tx.receivers)
        outcomes.push_back({r, deliver(tx, r)});
    if (on_end)
        on_end(tx, outcomes);
}

void Medium::prune(SimTime now)
{
    // anything that ended more than one maximal frame ago can no longer
    // overlap a frame still on the air
    const SimTime horizon = now - longest_airtime_ - SimTime{1};
    std::erase_if(history_, [horizon](const Transmission &t) { return t.end < horizon; });
}

} // namespace rplsim
