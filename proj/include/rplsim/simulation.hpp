#pragma once

#include <ostream>
#include <vector>

#include "rplsim/scenario.hpp"
#include "rplsim/telemetry.hpp"

namespace rplsim {

struct RunResult
{
    ScenarioConfig config;
    MetricsReport metrics;
    Topology topology;
    std::vector<NodeState> final_nodes;
    std::vector<EnergyLedger> ledgers; ///< index == node id
    std::uint64_t events_executed = 0;
};

/// Runs one scenario to completion. When `trace` is given, every executed
/// event and every radio state change is written to it as one JSON object
/// per line (see docs/formats.md).
RunResult run_scenario(const ScenarioConfig &cfg, std::ostream *trace = nullptr);

} // namespace rplsim
