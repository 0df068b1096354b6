#include "rplsim/energy.hpp"

namespace rplsim {

void EnergyLedger::charge(PowerState state, SimTime duration)
{
    if (duration < SimTime::zero())
        throw ContractViolation("energy charge with negative duration");
    switch (state) {
    case PowerState::Tx: t_tx += duration; break;
    case PowerState::Rx: t_rx += duration; break;
    case PowerState::Cpu: t_cpu_active += duration; break;
    case PowerState::Lpm: t_lpm += duration; break;
    }
}

double energy_mj(const EnergyLedger &ledger, const EnergyModel &model)
{
    const double milliamp_seconds = to_seconds(ledger.t_tx) * model.tx_ma + to_seconds(ledger.t_rx) * model.rx_ma +
                                    to_seconds(ledger.t_cpu_active) * model.cpu_ma +
                                    to_seconds(ledger.t_lpm) * model.lpm_ma;
    return milliamp_seconds * model.voltage;
}

double average_power_mw(const EnergyLedger &ledger, const EnergyModel &model, SimTime elapsed)
{
    if (elapsed <= SimTime::zero())
        throw ContractViolation("average power over a non-positive interval");
    return energy_mj(ledger, model) / to_seconds(elapsed);
}

std::string_view to_string(RadioState state)
{
    switch (state) {
    case RadioState::Off: return "off";
    case RadioState::Rx: return "rx";
    case RadioState::Tx: return "tx";
    }
    return "unknown";
}

EnergyMeter::EnergyMeter(std::size_t node_count) : tracks_(node_count) {}

void EnergyMeter::charge_span(Track &track, SimTime until)
{
    const SimTime span = until - track.since;
    switch (track.state) {
    case RadioState::Tx:
        track.ledger.charge(PowerState::Tx, span);
        track.ledger.charge(PowerState::Cpu, span);
        break;
    case RadioState::Rx:
        track.ledger.charge(PowerState::Rx, span);
        track.ledger.charge(PowerState::Cpu, span);
        break;
    case RadioState::Off:
        track.ledger.charge(PowerState::Lpm, span);
        break;
    }
    track.since = until;
}

void EnergyMeter::update(NodeId node, SimTime now)
{
    if (finished_)
        throw ContractViolation("energy meter used after finish()");
    Track &track = tracks_.at(node);
    const RadioState next = track.tx_depth > 0      ? RadioState::Tx
                            : track.listen_depth > 0 ? RadioState::Rx
                                                     : RadioState::Off;
    if (next == track.state)
        return;
    charge_span(track, now);
    track.state = next;
    if (observer_)
        observer_(now, node, next);
}

void EnergyMeter::begin_tx(NodeId node, SimTime now)
{
    ++tracks_.at(node).tx_depth;
    update(node, now);
}

void EnergyMeter::end_tx(NodeId node, SimTime now)
{
    Track &track = tracks_.at(node);
    if (track.tx_depth == 0)
        throw ContractViolation("end_tx without begin_tx");
    --track.tx_depth;
    update(node, now);
}

void EnergyMeter::begin_listen(NodeId node, SimTime now)
{
    ++tracks_.at(node).listen_depth;
    update(node, now);
}

void EnergyMeter::end_listen(NodeId node, SimTime now)
{
    Track &track = tracks_.at(node);
    if (track.listen_depth == 0)
        throw ContractViolation("end_listen without begin_listen");
    --track.listen_depth;
    update(node, now);
}

void EnergyMeter::finish(SimTime end)
{
    if (finished_)
        throw ContractViolation("energy meter finished twice");
    for (Track &track : tracks_)
        charge_span(track, end);
    finished_ = true;
}

} // namespace rplsim
