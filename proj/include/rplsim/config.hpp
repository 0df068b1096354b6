#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rplsim/scenario.hpp"

namespace rplsim {

/// Applies the keys of a scenario document on top of `base`. Unknown keys,
/// wrong types and out-of-range values raise ConfigError naming the field.
ScenarioConfig apply_scenario_json(const nlohmann::json &doc, ScenarioConfig base = {});

ScenarioConfig parse_scenario(const nlohmann::json &doc);
ScenarioConfig load_scenario(const std::filesystem::path &path);

nlohmann::json scenario_to_json(const ScenarioConfig &cfg);

struct SweepSpec
{
    nlohmann::json base = nlohmann::json::object(); ///< scenario keys shared by every run
    std::vector<std::size_t> node_counts;
    std::vector<ObjectiveKind> objectives;
    std::vector<double> rx_ratios;
    std::vector<TopologyKind> topologies;
    std::size_t seeds_per_cell = 1;
    std::uint64_t base_seed = 1;
};

SweepSpec parse_sweep(const nlohmann::json &doc);
SweepSpec load_sweep(const std::filesystem::path &path);

/// The Cartesian product, topology-major, seeds innermost.
std::vector<ScenarioConfig> expand_sweep(const SweepSpec &spec);

nlohmann::json read_json_file(const std::filesystem::path &path);

} // namespace rplsim
