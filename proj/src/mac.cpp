#include "rplsim/medium.hpp"

#include <algorithm>

namespace rplsim {

Mac::Mac(Engine &engine, Medium &medium, std::uint64_t master_seed) : engine_(engine), medium_(medium)
{
    const std::size_t n = medium_.node_count();
    stations_.reserve(n);
    for (NodeId id = 0; id < n; ++id) {
        Station station(derive_stream(master_seed, StreamPurpose::Medium, id));
        station.last_seq_from.assign(n, 0);
        stations_.push_back(std::move(station));
    }
}

void Mac::broadcast(NodeId sender, Frame frame, BroadcastDone done)
{
    Station &s = stations_.at(sender);
    if (s.busy)
        throw ContractViolation("broadcast on a busy MAC");
    frame.src = sender;
    frame.dst = kNoNode;
    if (frame.mac_seq == 0)
        frame.mac_seq = s.next_seq++;
    s.busy = true;
    s.frame = std::move(frame);
    s.broadcast_done = std::move(done);
    s.unicast_done = nullptr;
    s.attempts = 0;
    start_attempt(sender);
}

void Mac::unicast(NodeId sender, NodeId receiver, Frame frame, UnicastDone done)
{
    Station &s = stations_.at(sender);
    if (s.busy)
        throw ContractViolation("unicast on a busy MAC");
    if (receiver == sender || receiver >= stations_.size())
        throw ContractViolation("unicast to an invalid receiver");
    if (frame.bytes == 0)
        throw ContractViolation("unicast of an empty frame");
    frame.src = sender;
    frame.dst = receiver;
    if (frame.mac_seq == 0)
        frame.mac_seq = s.next_seq++;
    s.busy = true;
    s.frame = std::move(frame);
    s.unicast_done = std::move(done);
    s.broadcast_done = nullptr;
    s.attempts = 0;
    start_attempt(sender);
}

void Mac::start_attempt(NodeId node)
{
    Station &s = stations_[node];
    ++s.attempts;
    s.busy_sensings = 0;
    s.acked = false;
    schedule_backoff(node);
}

void Mac::schedule_backoff(NodeId node)
{
    Station &s = stations_[node];
    const std::uint64_t slots = s.backoff.uniform_int(0, medium_.config().backoff_slots - 1);
    engine_.schedule_in(medium_.config().backoff_unit * static_cast<std::int64_t>(slots), EventKind::TimerFire, node,
                        [this, node] { on_backoff_end(node); });
}

void Mac::on_backoff_end(NodeId node)
{
    Station &s = stations_[node];
    const MediumConfig &cfg = medium_.config();
    const bool ack_due = s.ack_reserved_until >= engine_.now();
    if (medium_.channel_busy(node) || ack_due) {
        ++s.busy_sensings;
        if (s.busy_sensings > cfg.max_csma_backoffs)
            attempt_failed(node);
        else
            schedule_backoff(node);
        return;
    }
    engine_.schedule_in(cfg.turnaround, EventKind::TxStart, node, [this, node] { start_frame(node); });
}

void Mac::start_frame(NodeId node)
{
    Station &s = stations_[node];
    if (medium_.transmitting(node)) {
        // our own ACK took the radio during turnaround
        ++s.busy_sensings;
        if (s.busy_sensings > medium_.config().max_csma_backoffs)
            attempt_failed(node);
        else
            schedule_backoff(node);
        return;
    }
    if (s.frame.is_broadcast()) {
        medium_.transmit(node, s.frame, [this, node](const Transmission &tx, std::span<const ReceptionOutcome> out) {
            on_broadcast_end(node, tx, out);
        });
    } else {
        medium_.transmit(node, s.frame, [this, node](const Transmission &tx, std::span<const ReceptionOutcome> out) {
            on_data_end(node, tx, out);
        });
    }
}

void Mac::on_broadcast_end(NodeId node, const Transmission &tx, std::span<const ReceptionOutcome> outcomes)
{
    Station &s = stations_[node];
    auto done = std::move(s.broadcast_done);
    s.broadcast_done = nullptr;
    s.busy = false;
    for (const ReceptionOutcome &o : outcomes) {
        if (o.result == Reception::Delivered)
            deliver_up(o.receiver, tx.frame);
    }
    if (done)
        done(true);
}

void Mac::on_data_end(NodeId node, const Transmission &tx, std::span<const ReceptionOutcome> outcomes)
{
    const NodeId dst = tx.frame.dst;
    for (const ReceptionOutcome &o : outcomes) {
        if (o.receiver != dst || o.result != Reception::Delivered)
            continue;
        Station &r = stations_[dst];
        if (r.last_seq_from[node] != tx.frame.mac_seq) {
            r.last_seq_from[node] = tx.frame.mac_seq;
            deliver_up(dst, tx.frame);
        }
        const SimTime ack_at = engine_.now() + medium_.config().turnaround;
        r.ack_reserved_until = std::max(r.ack_reserved_until, ack_at + medium_.airtime(medium_.config().ack_frame_bytes));
        const std::uint32_t seq = tx.frame.mac_seq;
        engine_.schedule(ack_at, EventKind::TxStart, dst, [this, dst, node, seq] { send_ack(dst, node, seq); });
    }

    medium_.open_listen_window(node);
    engine_.schedule_in(medium_.config().ack_wait, EventKind::TimerFire, node, [this, node] { on_ack_timeout(node); });
}

void Mac::send_ack(NodeId from, NodeId to, std::uint32_t seq)
{
    if (medium_.transmitting(from))
        return;
    Frame ack;
    ack.type = FrameType::Ack;
    ack.src = from;
    ack.dst = to;
    ack.mac_seq = seq;
    ack.bytes = medium_.config().ack_frame_bytes;
    medium_.transmit(from, std::move(ack), [this, to, seq](const Transmission &, std::span<const ReceptionOutcome> out) {
        for (const ReceptionOutcome &o : out) {
            if (o.receiver != to || o.result != Reception::Delivered)
                continue;
            Station &s = stations_[to];
            if (s.busy && !s.frame.is_broadcast() && s.frame.mac_seq == seq)
                s.acked = true;
        }
    });
}

void Mac::on_ack_timeout(NodeId node)
{
    medium_.close_listen_window(node);
    if (stations_[node].acked)
        finish_unicast(node, true);
    else
        attempt_failed(node);
}

void Mac::attempt_failed(NodeId node)
{
    Station &s = stations_[node];
    if (s.frame.is_broadcast()) {
        auto done = std::move(s.broadcast_done);
        s.broadcast_done = nullptr;
        s.busy = false;
        if (done)
            done(false);
        return;
    }
    if (s.attempts < medium_.config().max_transmissions)
        start_attempt(node);
    else
        finish_unicast(node, false);
}

void Mac::finish_unicast(NodeId node, bool success)
{
    Station &s = stations_[node];
    auto done = std::move(s.unicast_done);
    s.unicast_done = nullptr;
    s.busy = false;
    const UnicastResult result{success, s.attempts};
    if (done)
        done(result);
}

void Mac::deliver_up(NodeId at, const Frame &frame)
{
    engine_.schedule_in(SimTime{0}, EventKind::RxDeliver, at, [this, at, frame] {
        if (receive_)
            receive_(at, frame);
    });
}

} // namespace rplsim
