#include "rplsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace rplsim {

using nlohmann::json;

namespace {

void reject_unknown(const json &doc, const std::set<std::string> &known, const std::string &prefix)
{
    if (!doc.is_object())
        throw ConfigError("expected a JSON object", prefix.empty() ? "<root>" : prefix);
    for (const auto &[key, value] : doc.items()) {
        if (!known.contains(key))
            throw ConfigError("unknown key", prefix + key);
    }
}

double number(const json &v, const std::string &field)
{
    if (!v.is_number())
        throw ConfigError("expected a number", field);
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw ConfigError("expected a finite number", field);
    return d;
}

std::uint64_t count(const json &v, const std::string &field)
{
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError("expected a non-negative integer", field);
    return v.get<std::uint64_t>();
}

SimTime seconds_field(const json &v, const std::string &field)
{
    const double s = number(v, field);
    if (s < 0.0 || s > 1e9)
        throw ConfigError("expected seconds in [0, 1e9]", field);
    return from_seconds(s);
}

std::string text(const json &v, const std::string &field)
{
    if (!v.is_string())
        throw ConfigError("expected a string", field);
    return v.get<std::string>();
}

double probability(const json &v, const std::string &field)
{
    const double p = number(v, field);
    if (p < 0.0 || p > 1.0)
        throw ConfigError("must lie in [0, 1], got " + v.dump(), field);
    return p;
}

TopologyKind topology_of(const json &v, const std::string &field)
{
    const std::string s = text(v, field);
    if (s == "random")
        return TopologyKind::Random;
    if (s == "grid")
        return TopologyKind::Grid;
    throw ConfigError("expected \"random\" or \"grid\", got \"" + s + "\"", field);
}

ObjectiveKind objective_of(const json &v, const std::string &field)
{
    const std::string s = text(v, field);
    if (s == "of0")
        return ObjectiveKind::Of0;
    if (s == "etx")
        return ObjectiveKind::MrhofEtx;
    throw ConfigError("expected \"of0\" or \"etx\", got \"" + s + "\"", field);
}

TrafficClass class_of(const json &v, const std::string &field)
{
    const std::string s = text(v, field);
    if (auto c = traffic_class_from_string(s))
        return *c;
    throw ConfigError("unknown traffic class \"" + s + "\"", field);
}

unsigned small_count(const json &v, const std::string &field)
{
    const std::uint64_t c = count(v, field);
    if (c > 1'000'000)
        throw ConfigError("value too large", field);
    return static_cast<unsigned>(c);
}

PathCost etx_units(const json &v, const std::string &field)
{
    const double etx = number(v, field);
    if (etx < 1.0 || etx * kEtxScale >= kMaxPathCost)
        throw ConfigError("ETX must lie in [1, 511]", field);
    return static_cast<PathCost>(std::lround(etx * kEtxScale));
}

void apply_medium(const json &doc, MediumConfig &m)
{
    static const std::set<std::string> known{
        "tx_range", "bitrate", "max_transmissions", "ack_wait", "turnaround", "backoff_unit", "backoff_slots", "max_csma_backoffs", "phy_overhead_bytes", "control_frame_bytes", "data_header_bytes",
        "data_payload_bytes", "ack_frame_bytes", "link_ratios"};
    reject_unknown(doc, known, "medium.");
    for (const auto &[key, v] : doc.items()) {
        const std::string f = "medium." + key;
        if (key == "tx_range") m.tx_range_m = number(v, f);
        else if (key == "bitrate") m.bitrate_bps = small_count(v, f);
        else if (key == "max_transmissions") m.max_transmissions = small_count(v, f);
        else if (key == "ack_wait") m.ack_wait = seconds_field(v, f);
        else if (key == "turnaround") m.turnaround = seconds_field(v, f);
        else if (key == "backoff_unit") m.backoff_unit = seconds_field(v, f);
        else if (key == "backoff_slots") m.backoff_slots = small_count(v, f);
        else if (key == "max_csma_backoffs") m.max_csma_backoffs = small_count(v, f);
        else if (key == "phy_overhead_bytes") m.phy_overhead_bytes = small_count(v, f);
        else if (key == "control_frame_bytes") m.control_frame_bytes = small_count(v, f);
        else if (key == "data_header_bytes") m.data_header_bytes = small_count(v, f);
        else if (key == "data_payload_bytes") m.data_payload_bytes = small_count(v, f);
        else if (key == "ack_frame_bytes") m.ack_frame_bytes = small_count(v, f);
        else if (key == "link_ratios") {
            if (!v.is_array())
                throw ConfigError("expected an array", f);
            m.link_ratios.clear();
            for (const json &link : v) {
                reject_unknown(link, {"a", "b", "ratio"}, f + ".");
                if (!link.contains("a") || !link.contains("b") || !link.contains("ratio"))
                    throw ConfigError("each link needs a, b and ratio", f);
                m.link_ratios.push_back({static_cast<NodeId>(small_count(link["a"], f + ".a")),
                                         static_cast<NodeId>(small_count(link["b"], f + ".b")),
                                         probability(link["ratio"], f + ".ratio")});
            }
        }
    }
}

void apply_rpl(const json &doc, RplConfig &r)
{
    static const std::set<std::string> known{
        "trickle_imin",   "trickle_doublings", "trickle_k",         "dis_period",           "parent_expiry",
        "queue_capacity", "ttl",               "max_rank_increase", "parent_failure_limit", "etx_initial",
        "etx_old_weight", "etx_failure_penalty_factor"};
    reject_unknown(doc, known, "rpl.");
    for (const auto &[key, v] : doc.items()) {
        const std::string f = "rpl." + key;
        if (key == "trickle_imin") r.trickle.i_min = seconds_field(v, f);
        else if (key == "trickle_doublings") r.trickle.doublings = small_count(v, f);
        else if (key == "trickle_k") r.trickle.redundancy_k = small_count(v, f);
        else if (key == "dis_period") r.dis_period = seconds_field(v, f);
        else if (key == "parent_expiry") r.parent_expiry = seconds_field(v, f);
        else if (key == "queue_capacity") r.queue_capacity = small_count(v, f);
        else if (key == "ttl") r.ttl = small_count(v, f);
        else if (key == "max_rank_increase") r.max_rank_increase = small_count(v, f);
        else if (key == "parent_failure_limit") r.parent_failure_limit = small_count(v, f);
        else if (key == "etx_initial") r.etx.initial_guess = etx_units(v, f);
        else if (key == "etx_old_weight") r.etx.old_weight_percent = small_count(v, f);
        else if (key == "etx_failure_penalty_factor") r.etx.failure_penalty_factor = small_count(v, f);
    }
}

void apply_energy(const json &doc, EnergyModel &e)
{
    reject_unknown(doc, {"tx_ma", "rx_ma", "cpu_ma", "lpm_ma", "voltage"}, "energy.");
    for (const auto &[key, v] : doc.items()) {
        const std::string f = "energy." + key;
        const double d = number(v, f);
        if (d < 0.0)
            throw ConfigError("must not be negative", f);
        if (key == "tx_ma") e.tx_ma = d;
        else if (key == "rx_ma") e.rx_ma = d;
        else if (key == "cpu_ma") e.cpu_ma = d;
        else if (key == "lpm_ma") e.lpm_ma = d;
        else if (key == "voltage") e.voltage = d;
    }
}

void apply_traffic(const json &doc, std::array<TrafficProfile, kTrafficClassCount> &profiles)
{
    if (!doc.is_object())
        throw ConfigError("expected a JSON object", "traffic");
    for (const auto &[key, v] : doc.items()) {
        const std::string f = "traffic." + key;
        const auto cls = traffic_class_from_string(key);
        if (!cls)
            throw ConfigError("unknown traffic class", f);
        reject_unknown(v, {"interval", "jitter"}, f + ".");
        TrafficProfile &p = profiles[index_of(*cls)];
        if (v.contains("interval")) {
            p.mean_interval = seconds_field(v["interval"], f + ".interval");
            if (p.mean_interval <= SimTime::zero())
                throw ConfigError("must be positive", f + ".interval");
        }
        if (v.contains("jitter")) {
            const std::string mode = text(v["jitter"], f + ".jitter");
            if (mode == "uniform")
                p.jitter = JitterMode::UniformJitter;
            else if (mode == "fixed")
                p.jitter = JitterMode::Fixed;
            else
                throw ConfigError("expected \"uniform\" or \"fixed\"", f + ".jitter");
        }
    }
}

} // namespace

ScenarioConfig apply_scenario_json(const json &doc, ScenarioConfig cfg)
{
    static const std::set<std::string> known{
        "$schema", "scenario_id", "node_count", "topology", "area_side",   "grid_spacing", "objective", "rx_success_ratio",
        "duration", "warmup",     "drain",      "seed",     "traffic_mix", "traffic",      "medium",    "rpl",
        "energy"};
    reject_unknown(doc, known, "");
    for (const auto &[key, v] : doc.items()) {
        if (key == "$schema") continue;
        else if (key == "scenario_id") cfg.scenario_id = text(v, key);
        else if (key == "node_count") cfg.node_count = static_cast<std::size_t>(count(v, key));
        else if (key == "topology") cfg.topology = topology_of(v, key);
        else if (key == "area_side") cfg.area_side_m = number(v, key);
        else if (key == "grid_spacing") cfg.grid_spacing_m = number(v, key);
        else if (key == "objective") cfg.objective = objective_of(v, key);
        else if (key == "rx_success_ratio") cfg.medium.rx_success_ratio = probability(v, key);
        else if (key == "duration") cfg.duration = seconds_field(v, key);
        else if (key == "warmup") cfg.warmup = seconds_field(v, key);
        else if (key == "drain") cfg.drain = seconds_field(v, key);
        else if (key == "seed") cfg.seed = count(v, key);
        else if (key == "traffic_mix") {
            if (!v.is_array() || v.empty())
                throw ConfigError("expected a non-empty array of class names", key);
            cfg.traffic_mix.clear();
            for (const json &c : v)
                cfg.traffic_mix.push_back(class_of(c, key));
        } else if (key == "traffic") apply_traffic(v, cfg.traffic);
        else if (key == "medium") apply_medium(v, cfg.medium);
        else if (key == "rpl") apply_rpl(v, cfg.rpl);
        else if (key == "energy") apply_energy(v, cfg.energy);
    }
    cfg.rpl.objective = cfg.objective;
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario(const json &doc)
{
    return apply_scenario_json(doc, ScenarioConfig{});
}

json read_json_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }
}

ScenarioConfig load_scenario(const std::filesystem::path &path)
{
    return parse_scenario(read_json_file(path));
}

json scenario_to_json(const ScenarioConfig &cfg)
{
    json mix = json::array();
    for (TrafficClass c : cfg.traffic_mix)
        mix.push_back(to_string(c));
    json traffic = json::object();
    for (const TrafficProfile &p : cfg.traffic) {
        traffic[std::string(to_string(p.cls))] = {
            {"interval", to_seconds(p.mean_interval)},
            {"jitter", p.jitter == JitterMode::Fixed ? "fixed" : "uniform"}};
    }
    json links = json::array();
    for (const LinkRatio &l : cfg.medium.link_ratios)
        links.push_back({{"a", l.a}, {"b", l.b}, {"ratio", l.ratio}});
    const MediumConfig &m = cfg.medium;
    const RplConfig &r = cfg.rpl;
    json doc = {
        {"node_count", cfg.node_count},
        {"topology", to_string(cfg.topology)},
        {"area_side", cfg.area_side_m},
        {"grid_spacing", cfg.grid_spacing_m},
        {"objective", to_string(cfg.objective)},
        {"rx_success_ratio", m.rx_success_ratio},
        {"duration", to_seconds(cfg.duration)},
        {"warmup", to_seconds(cfg.warmup)},
        {"drain", to_seconds(cfg.drain)},
        {"seed", cfg.seed},
        {"traffic_mix", mix},
        {"traffic", traffic},
        {"medium",
         {{"tx_range", m.tx_range_m},
          {"bitrate", m.bitrate_bps},
          {"max_transmissions", m.max_transmissions},
          {"ack_wait", to_seconds(m.ack_wait)},
          {"turnaround", to_seconds(m.turnaround)},
          {"backoff_unit", to_seconds(m.backoff_unit)},
          {"backoff_slots", m.backoff_slots},
          {"max_csma_backoffs", m.max_csma_backoffs},
          {"phy_overhead_bytes", m.phy_overhead_bytes},
          {"control_frame_bytes", m.control_frame_bytes},
          {"data_header_bytes", m.data_header_bytes},
          {"data_payload_bytes", m.data_payload_bytes},
          {"ack_frame_bytes", m.ack_frame_bytes},
          {"link_ratios", links}}},
        {"rpl",
         {{"trickle_imin", to_seconds(r.trickle.i_min)},
          {"trickle_doublings", r.trickle.doublings},
          {"trickle_k", r.trickle.redundancy_k},
          {"dis_period", to_seconds(r.dis_period)},
          {"parent_expiry", to_seconds(r.parent_expiry)},
          {"queue_capacity", r.queue_capacity},
          {"ttl", r.ttl},
          {"max_rank_increase", r.max_rank_increase},
          {"parent_failure_limit", r.parent_failure_limit},
          {"etx_initial", static_cast<double>(r.etx.initial_guess) / kEtxScale},
          {"etx_old_weight", r.etx.old_weight_percent},
          {"etx_failure_penalty_factor", r.etx.failure_penalty_factor}}},
        {"energy",
         {{"tx_ma", cfg.energy.tx_ma},
          {"rx_ma", cfg.energy.rx_ma},
          {"cpu_ma", cfg.energy.cpu_ma},
          {"lpm_ma", cfg.energy.lpm_ma},
          {"voltage", cfg.energy.voltage}}},
    };
    if (!cfg.scenario_id.empty())
        doc["scenario_id"] = cfg.scenario_id;
    return doc;
}

SweepSpec parse_sweep(const json &doc)
{
    reject_unknown(doc, {"$schema", "base", "node_counts", "objectives", "rx_ratios", "topologies", "seeds_per_cell",
                         "base_seed"},
                   "");
    SweepSpec spec;
    auto list = [&](const char *key) -> const json & {
        if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty())
            throw ConfigError("expected a non-empty array", key);
        return doc[key];
    };
    if (doc.contains("base")) {
        if (!doc["base"].is_object())
            throw ConfigError("expected a JSON object", "base");
        spec.base = doc["base"];
        // validates the shared keys once, up front
        apply_scenario_json(spec.base);
    }
    for (const json &v : list("node_counts"))
        spec.node_counts.push_back(static_cast<std::size_t>(count(v, "node_counts")));
    for (const json &v : list("objectives"))
        spec.objectives.push_back(objective_of(v, "objectives"));
    for (const json &v : list("rx_ratios"))
        spec.rx_ratios.push_back(probability(v, "rx_ratios"));
    for (const json &v : list("topologies"))
        spec.topologies.push_back(topology_of(v, "topologies"));
    if (doc.contains("seeds_per_cell")) {
        spec.seeds_per_cell = static_cast<std::size_t>(count(doc["seeds_per_cell"], "seeds_per_cell"));
        if (spec.seeds_per_cell == 0)
            throw ConfigError("must be at least 1", "seeds_per_cell");
    }
    if (doc.contains("base_seed"))
        spec.base_seed = count(doc["base_seed"], "base_seed");
    return spec;
}

SweepSpec load_sweep(const std::filesystem::path &path)
{
    return parse_sweep(read_json_file(path));
}

std::vector<ScenarioConfig> expand_sweep(const SweepSpec &spec)
{
    const ScenarioConfig base = apply_scenario_json(spec.base);
    std::vector<ScenarioConfig> runs;
    for (TopologyKind topology : spec.topologies) {
        for (ObjectiveKind objective : spec.objectives) {
            for (double rx : spec.rx_ratios) {
                for (std::size_t n : spec.node_counts) {
                    for (std::size_t k = 0; k < spec.seeds_per_cell; ++k) {
                        ScenarioConfig cfg = base;
                        cfg.scenario_id.clear();
                        cfg.topology = topology;
                        cfg.objective = objective;
                        cfg.rpl.objective = objective;
                        cfg.medium.rx_success_ratio = rx;
                        cfg.node_count = n;
                        cfg.seed = spec.base_seed + k;
                        runs.push_back(std::move(cfg));
                    }
                }
            }
        }
    }
    return runs;
}

} // namespace rplsim
