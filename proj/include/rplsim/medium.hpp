#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rplsim/energy.hpp"
#include "rplsim/engine.hpp"
#include "rplsim/messages.hpp"
#include "rplsim/random.hpp"

namespace rplsim {

/// Reception probability override for one undirected link.
struct LinkRatio
{
    NodeId a;
    NodeId b;
    double ratio;
};

struct MediumConfig
{
    double tx_range_m = 100.0;
    double rx_success_ratio = 1.0;
    std::uint32_t bitrate_bps = 250'000;
    unsigned max_transmissions = 4;

    SimTime ack_wait{864};
    SimTime turnaround{192};
    SimTime backoff_unit{320};
    /// Each attempt waits U{0..backoff_slots-1} units before sensing.
    unsigned backoff_slots = 1024;
    unsigned max_csma_backoffs = 4;

    std::uint32_t phy_overhead_bytes = 6;
    std::uint32_t control_frame_bytes = 64;
    std::uint32_t data_header_bytes = 20;
    std::uint32_t data_payload_bytes = 30;
    std::uint32_t ack_frame_bytes = 5;

    std::vector<LinkRatio> link_ratios;

    /// Throws ConfigError naming the first bad field.
    void validate() const;
};

/// Closed unit disk: distance == range is in range.
bool in_range(Position a, Position b, const MediumConfig &cfg);

enum class FrameType : std::uint8_t
{
    Dio,
    Dis,
    Data,
    Ack,
};

std::string_view to_string(FrameType type);

struct Frame
{
    FrameType type = FrameType::Data;
    NodeId src = kNoNode;
    NodeId dst = kNoNode; ///< kNoNode for broadcast
    std::uint32_t mac_seq = 0;
    std::uint32_t bytes = 0; ///< MAC frame size without PHY overhead
    std::variant<std::monostate, DioMessage, DisMessage, DataPacket> payload;

    bool is_broadcast() const { return dst == kNoNode; }
};

struct Transmission
{
    std::uint64_t id = 0;
    NodeId sender = kNoNode;
    Frame frame;
    SimTime start{0};
    SimTime end{0};
    std::vector<NodeId> receivers; ///< every node in range, sender excluded
};

enum class Reception : std::uint8_t
{
    Delivered,
    LostRandom,
    LostCollision,
};

struct ReceptionOutcome
{
    NodeId receiver;
    Reception result;
};

/// Shared radio channel over a static unit-disk graph.
///
/// A frame is lost at a receiver when any other transmission audible there
/// (including the receiver's own) overlaps it; otherwise it survives with the
/// link's reception probability, one draw per receiver per frame. Every node
/// in range listens for the duration of each frame.
class Medium
{
public:
    using EndHandler = std::function<void(const Transmission &, std::span<const ReceptionOutcome>)>;

    Medium(Engine &engine, std::vector<Position> positions, MediumConfig cfg, RandomStream reception,
           EnergyMeter &energy);

    std::size_t node_count() const { return positions_.size(); }
    const MediumConfig &config() const { return cfg_; }
    const std::vector<NodeId> &neighbors(NodeId node) const { return neighbors_.at(node); }
    bool adjacent(NodeId a, NodeId b) const { return adjacency_[a * positions_.size() + b] != 0; }
    double link_ratio(NodeId a, NodeId b) const;

    SimTime airtime(std::uint32_t frame_bytes) const;

    /// True when a transmission audible at `listener`, or its own, is in flight.
    bool channel_busy(NodeId listener) const;
    bool transmitting(NodeId node) const;

    /// Puts `frame` on the air now; `on_end` runs at the end of the frame with
    /// one outcome per in-range receiver.
    void transmit(NodeId sender, Frame frame, EndHandler on_end);

    /// Fate of `tx` at `receiver`, which must be in range of the sender.
    Reception deliver(const Transmission &tx, NodeId receiver);

    std::uint64_t transmissions_started() const { return next_id_ - 1; }

    /// Keeps `node`'s receiver on outside any frame, e.g. while awaiting an ACK.
    void open_listen_window(NodeId node) { energy_.begin_listen(node, engine_.now()); }
    void close_listen_window(NodeId node) { energy_.end_listen(node, engine_.now()); }

private:
    void finish(std::uint64_t id, const EndHandler &on_end);
    void prune(SimTime now);

    Engine &engine_;
    std::vector<Position> positions_;
    MediumConfig cfg_;
    RandomStream reception_;
    EnergyMeter &energy_;

    std::vector<std::uint8_t> adjacency_;
    std::vector<std::vector<NodeId>> neighbors_;
    std::vector<double> ratios_;
    std::vector<Transmission> history_;
    SimTime longest_airtime_{0};
    std::uint64_t next_id_ = 1;
};

struct UnicastResult
{
    bool success = false;
    unsigned attempts_used = 0;
};

/// CSMA/CA with link-layer ACKs and bounded retransmissions on top of Medium.
///
/// Each attempt waits a uniform backoff in a fixed window, senses the
/// channel, and transmits after the rx-to-tx turnaround. A busy channel
/// redraws the backoff; exceeding max_csma_backoffs fails the attempt. A
/// unicast attempt succeeds only if the data frame and the ACK both arrive. Receivers drop retransmitted duplicates but still ACK them.
class Mac
{
public:
    using ReceiveHandler = std::function<void(NodeId at, const Frame &frame)>;
    using BroadcastDone = std::function<void(bool transmitted)>;
    using UnicastDone = std::function<void(UnicastResult)>;

    Mac(Engine &engine, Medium &medium, std::uint64_t master_seed);

    void set_receive_handler(ReceiveHandler handler) { receive_ = std::move(handler); }

    bool busy(NodeId node) const { return stations_.at(node).busy; }
    const MediumConfig &config() const { return medium_.config(); }

    /// Next MAC sequence number for frames built by `node`.
    std::uint32_t next_sequence(NodeId node) { return stations_.at(node).next_seq++; }

    void broadcast(NodeId sender, Frame frame, BroadcastDone done);
    void unicast(NodeId sender, NodeId receiver, Frame frame, UnicastDone done);

private:
    struct Station
    {
        explicit Station(RandomStream stream) : backoff(std::move(stream)) {}

        RandomStream backoff;
        bool busy = false;
        Frame frame;
        UnicastDone unicast_done;
        BroadcastDone broadcast_done;
        unsigned attempts = 0;
        unsigned busy_sensings = 0;
        bool acked = false;
        std::uint32_t next_seq = 1;
        SimTime ack_reserved_until{-1};
        std::vector<std::uint32_t> last_seq_from;
    };

    void start_attempt(NodeId node);
    void schedule_backoff(NodeId node);
    void on_backoff_end(NodeId node);
    void start_frame(NodeId node);
    void on_broadcast_end(NodeId node, const Transmission &tx, std::span<const ReceptionOutcome> outcomes);
    void on_data_end(NodeId node, const Transmission &tx, std::span<const ReceptionOutcome> outcomes);
    void on_ack_timeout(NodeId node);
    void send_ack(NodeId from, NodeId to, std::uint32_t seq);
    void attempt_failed(NodeId node);
    void finish_unicast(NodeId node, bool success);
    void deliver_up(NodeId at, const Frame &frame);

    Engine &engine_;
    Medium &medium_;
    std::vector<Station> stations_;
    ReceiveHandler receive_;
};

} // namespace rplsim
