#pragma once

#include <functional>
#include <vector>

#include "rplsim/types.hpp"

namespace rplsim {

enum class PowerState : std::uint8_t
{
    Tx,
    Rx,
    Cpu,
    Lpm,
};

/// Current draw per state (mA) and supply voltage. Defaults are typical
/// 802.15.4 mote figures.
struct EnergyModel
{
    double tx_ma = 17.4;
    double rx_ma = 19.7;
    double cpu_ma = 1.8;
    double lpm_ma = 0.0545;
    double voltage = 3.0;
};

/// Time spent per radio and CPU state. The CPU pair (active, lpm)
/// partitions elapsed time; the radio pair (tx, rx) never overlaps.
struct EnergyLedger
{
    SimTime t_tx{0};
    SimTime t_rx{0};
    SimTime t_cpu_active{0};
    SimTime t_lpm{0};

    /// Throws ContractViolation on negative duration.
    void charge(PowerState state, SimTime duration);

    SimTime radio_on() const { return t_tx + t_rx; }
    SimTime cpu_total() const { return t_cpu_active + t_lpm; }

    friend bool operator==(const EnergyLedger &, const EnergyLedger &) = default;
};

/// Mean power in milliwatts over `elapsed`. Throws ContractViolation when
/// elapsed is not positive.
double average_power_mw(const EnergyLedger &ledger, const EnergyModel &model, SimTime elapsed);

double energy_mj(const EnergyLedger &ledger, const EnergyModel &model);

enum class RadioState : std::uint8_t
{
    Off,
    Rx,
    Tx,
};

std::string_view to_string(RadioState state);

/// Per-node radio timeline feeding the energy ledgers.
///
/// The radio is in Tx while a frame is being sent, Rx while at least one
/// listening reason is open (an audible frame or an ACK wait), and Off
/// otherwise. The CPU is active whenever the radio is on. Time is charged
/// on every state transition, so the ledger is exact in microseconds.
class EnergyMeter
{
public:
    using Observer = std::function<void(SimTime, NodeId, RadioState)>;

    explicit EnergyMeter(std::size_t node_count);

    void begin_tx(NodeId node, SimTime now);
    void end_tx(NodeId node, SimTime now);
    void begin_listen(NodeId node, SimTime now);
    void end_listen(NodeId node, SimTime now);

    /// Charges every node up to `end`. Further calls are contract violations.
    void finish(SimTime end);

    RadioState state(NodeId node) const { return tracks_.at(node).state; }
    const EnergyLedger &ledger(NodeId node) const { return tracks_.at(node).ledger; }
    std::size_t node_count() const { return tracks_.size(); }

    void set_observer(Observer observer) { observer_ = std::move(observer); }

private:
    struct Track
    {
        int tx_depth = 0;
        int listen_depth = 0;
        RadioState state = RadioState::Off;
        SimTime since{0};
        EnergyLedger ledger;
    };

    void update(NodeId node, SimTime now);
    static void charge_span(Track &track, SimTime until);

    std::vector<Track> tracks_;
    Observer observer_;
    bool finished_ = false;
};

} // namespace rplsim
