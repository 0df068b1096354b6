#include "rplsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace rplsim {

std::string_view to_string(TrafficClass c)
{
    switch (c) {
    case TrafficClass::HighCritical: return "high-critical";
    case TrafficClass::Critical: return "critical";
    case TrafficClass::LowCritical: return "low-critical";
    case TrafficClass::Temperature: return "temperature";
    }
    return "unknown";
}

std::optional<TrafficClass> traffic_class_from_string(std::string_view name)
{
    for (TrafficClass c : kAllTrafficClasses) {
        if (to_string(c) == name)
            return c;
    }
    return std::nullopt;
}

std::string_view to_string(TopologyKind kind)
{
    return kind == TopologyKind::Grid ? "grid" : "random";
}

std::string_view to_string(ObjectiveKind kind)
{
    return kind == ObjectiveKind::MrhofEtx ? "etx" : "of0";
}

std::array<TrafficProfile, kTrafficClassCount> default_traffic_profiles()
{
    using std::chrono::seconds;
    return {{
        {TrafficClass::HighCritical, seconds{10}, JitterMode::UniformJitter},
        {TrafficClass::Critical, seconds{20}, JitterMode::UniformJitter},
        {TrafficClass::LowCritical, seconds{300}, JitterMode::Fixed},
        {TrafficClass::Temperature, seconds{3600}, JitterMode::UniformJitter},
    }};
}

void ScenarioConfig::validate() const
{
    if (node_count < 2)
        throw ConfigError("need the sink and at least one sensor (>= 2)", "node_count");
    if (node_count > 5000)
        throw ConfigError("at most 5000 nodes are supported", "node_count");
    if (scenario_id.find_first_of(",\"\n\r") != std::string::npos)
        throw ConfigError("must not contain commas, quotes or newlines", "scenario_id");
    if (!(std::isfinite(area_side_m) && area_side_m > 0.0))
        throw ConfigError("must be a positive length in meters", "area_side");
    if (topology == TopologyKind::Grid) {
        if (!(std::isfinite(grid_spacing_m) && grid_spacing_m > 0.0))
            throw ConfigError("must be a positive length in meters", "grid_spacing");
    }
    if (warmup < SimTime::zero())
        throw ConfigError("must not be negative", "warmup");
    if (duration <= warmup)
        throw ConfigError("must exceed warmup", "duration");
    if (drain < SimTime::zero() || drain >= duration)
        throw ConfigError("must lie in [0, duration)", "drain");
    if (traffic_mix.empty())
        throw ConfigError("must name at least one class", "traffic_mix");
    for (std::size_t i = 0; i < traffic.size(); ++i) {
        if (traffic[i].cls != kAllTrafficClasses[i])
            throw ConfigError("profiles out of order", "traffic");
        if (traffic[i].mean_interval <= SimTime::zero())
            throw ConfigError("interval must be positive", "traffic." + std::string(to_string(traffic[i].cls)));
    }
    try {
        medium.validate();
    } catch (const ConfigError &e) {
        if (e.field() == "rx_success_ratio")
            throw;
        throw ConfigError(e.message(), "medium." + e.field());
    }
    for (const LinkRatio &link : medium.link_ratios) {
        if (link.a >= node_count || link.b >= node_count)
            throw ConfigError("link endpoint is not a node id", "medium.link_ratios");
    }
    if (rpl.trickle.i_min <= SimTime::zero())
        throw ConfigError("must be positive", "rpl.trickle_imin");
    if (rpl.trickle.doublings > 20)
        throw ConfigError("at most 20", "rpl.trickle_doublings");
    if (rpl.trickle.redundancy_k == 0)
        throw ConfigError("must be at least 1", "rpl.trickle_k");
    if (rpl.dis_period <= SimTime::zero())
        throw ConfigError("must be positive", "rpl.dis_period");
    if (rpl.parent_expiry <= SimTime::zero())
        throw ConfigError("must be positive", "rpl.parent_expiry");
    if (rpl.queue_capacity == 0)
        throw ConfigError("must be at least 1", "rpl.queue_capacity");
    if (rpl.ttl == 0)
        throw ConfigError("must be at least 1", "rpl.ttl");
    if (rpl.etx.initial_guess < kEtxScale)
        throw ConfigError("initial ETX must be at least 1.0", "rpl.etx_initial");
    if (rpl.etx.old_weight_percent > 100)
        throw ConfigError("must lie in [0, 100]", "rpl.etx_old_weight");
    if (energy.voltage <= 0.0 || energy.tx_ma < 0.0 || energy.rx_ma < 0.0 || energy.cpu_ma < 0.0 ||
        energy.lpm_ma < 0.0)
        throw ConfigError("currents must be non-negative and voltage positive", "energy");
}

std::string ScenarioConfig::id() const
{
    if (!scenario_id.empty())
        return scenario_id;
    std::ostringstream out;
    out << to_string(topology) << '-' << to_string(objective) << "-rx" << std::lround(medium.rx_success_ratio * 100)
        << "-n" << node_count;
    return out.str();
}

bool is_connected(std::span<const Position> positions, const MediumConfig &medium)
{
    const std::size_t n = positions.size();
    if (n == 0)
        return true;
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < n; ++v) {
            if (!seen[v] && in_range(positions[u], positions[v], medium)) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n;
}

Topology generate_random_topology(const ScenarioConfig &cfg, RandomStream &stream)
{
    if (!(cfg.area_side_m > 0.0))
        throw ConfigError("must be positive", "area_side");
    constexpr int kMaxAttempts = 1000;
    const double side = cfg.area_side_m;
    Topology topo;
    topo.sink = 0;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        topo.positions.assign(1, Position{side / 2, side / 2});
        for (std::size_t i = 1; i < cfg.node_count; ++i) {
            const double x = stream.uniform(0.0, side);
            const double y = stream.uniform(0.0, side);
            topo.positions.push_back({x, y});
        }
        if (is_connected(topo.positions, cfg.medium))
            return topo;
    }
    std::ostringstream msg;
    msg << "no connected layout of " << cfg.node_count << " nodes in a " << side << " m square at "
        << cfg.medium.tx_range_m << " m range after " << kMaxAttempts << " attempts; density too low";
    throw ConfigError(msg.str(), "area_side");
}

Topology generate_grid_topology(const ScenarioConfig &cfg)
{
    if (cfg.grid_spacing_m > cfg.medium.tx_range_m)
        throw ConfigError("grid spacing exceeds radio range; lattice would be disconnected", "grid_spacing");

    const std::size_t n = cfg.node_count;
    std::size_t cols = 1;
    while (cols * cols < n)
        ++cols;

    std::vector<Position> cells;
    cells.reserve(n);
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Position p{static_cast<double>(i % cols) * cfg.grid_spacing_m,
                         static_cast<double>(i / cols) * cfg.grid_spacing_m};
        cells.push_back(p);
        cx += p.x;
        cy += p.y;
    }
    const Position centroid{cx / static_cast<double>(n), cy / static_cast<double>(n)};

    std::size_t sink_cell = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (distance(cells[i], centroid) < distance(cells[sink_cell], centroid))
            sink_cell = i;
    }

    Topology topo;
    topo.sink = 0;
    topo.positions.push_back(cells[sink_cell]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i != sink_cell)
            topo.positions.push_back(cells[i]);
    }
    return topo;
}

Topology generate_topology(const ScenarioConfig &cfg)
{
    if (cfg.topology == TopologyKind::Grid)
        return generate_grid_topology(cfg);
    RandomStream stream = derive_stream(cfg.seed, StreamPurpose::Topology);
    return generate_random_topology(cfg, stream);
}

std::vector<TrafficClass> assign_traffic_classes(std::span<const NodeId> sensors, std::span<const TrafficClass> mix)
{
    if (mix.empty())
        throw ContractViolation("assign_traffic_classes: empty class mix");
    std::vector<TrafficClass> out;
    out.reserve(sensors.size());
    const std::size_t blocks = mix.size();
    const std::size_t base = sensors.size() / blocks;
    const std::size_t extra = sensors.size() % blocks;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t size = base + (b < extra ? 1 : 0);
        out.insert(out.end(), size, mix[b]);
    }
    return out;
}

SimTime next_send_time(const TrafficProfile &profile, SimTime now, RandomStream &stream)
{
    const std::int64_t period = profile.mean_interval.count();
    if (profile.jitter == JitterMode::Fixed)
        return now + profile.mean_interval;
    const auto lo = static_cast<std::uint64_t>(period / 2);
    const auto hi = static_cast<std::uint64_t>(period + period / 2);
    return now + SimTime{static_cast<std::int64_t>(stream.uniform_int(lo, hi))};
}

} // namespace rplsim
