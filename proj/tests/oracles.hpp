#pragma once

// Independent reference computations used to check the simulator. None of
// these reuse simulator code beyond plain data types.

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rplsim/energy.hpp"
#include "rplsim/types.hpp"

namespace oracle {

using rplsim::NodeId;
using rplsim::Position;

/// Hop distance from `root` over the closed unit-disk graph; absent when
/// unreachable.
std::vector<std::optional<unsigned>> bfs_hops(const std::vector<Position> &positions, double range, NodeId root);

struct ShortestPaths
{
    std::vector<double> distance; ///< +inf when unreachable
    std::vector<unsigned> hops;   ///< hop count of one minimum path
};

/// Dijkstra over the unit-disk graph with edge weight `weight(a, b)`.
ShortestPaths dijkstra(const std::vector<Position> &positions, double range, NodeId root,
                       const std::function<double(NodeId, NodeId)> &weight);

/// Expected attempts of an exchange that succeeds with probability `p` per
/// attempt and gives up after `max_attempts`, by enumerating every outcome
/// sequence of length max_attempts.
double truncated_geometric_mean(double p, unsigned max_attempts);

double binomial_pmf(unsigned n, unsigned k, double p);

/// Pearson statistic of `observed` counts against `expected` probabilities.
double chi_square(const std::vector<std::uint64_t> &observed, const std::vector<double> &expected);

/// Per-node time in each state recomputed from the radio records of a trace.
struct ReplayedTrace
{
    std::vector<rplsim::EnergyLedger> ledgers;
    std::int64_t end_time_us = -1;
    std::uint64_t event_records = 0;
    /// app-send fire times per node, in order.
    std::map<NodeId, std::vector<std::int64_t>> app_sends;
};

ReplayedTrace replay_trace(std::istream &trace, std::size_t node_count);

/// Mean power in mW written out from first principles.
double power_mw(const rplsim::EnergyLedger &ledger, const rplsim::EnergyModel &model, std::int64_t elapsed_us);

} // namespace oracle
