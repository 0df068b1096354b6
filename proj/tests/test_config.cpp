#include <doctest.h>

#include <string>

#include "rplsim/config.hpp"

using namespace rplsim;
using nlohmann::json;

namespace {

std::string error_field(const json &doc)
{
    try {
        parse_scenario(doc);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("an empty document yields the defaults")
{
    const ScenarioConfig cfg = parse_scenario(json::object());
    CHECK(cfg.node_count == 20);
    CHECK(cfg.duration == from_seconds(900));
    CHECK(cfg.warmup == from_seconds(60));
    CHECK(cfg.medium.rx_success_ratio == 1.0);
    CHECK(cfg.area_side_m == 300);
    CHECK(cfg.grid_spacing_m == 60);
}

TEST_CASE("scenario keys are applied")
{
    const json doc = json::parse(R"({
        "scenario_id": "demo", "topology": "grid", "node_count": 9, "objective": "etx",
        "rx_success_ratio": 0.8, "duration": 120.5, "warmup": 10, "drain": 5, "seed": 99,
        "traffic_mix": ["low-critical", "critical"],
        "traffic": {"critical": {"interval": 7, "jitter": "fixed"}},
        "medium": {"tx_range": 80, "max_transmissions": 3, "backoff_slots": 16,
                   "link_ratios": [{"a": 0, "b": 1, "ratio": 0.5}]},
        "rpl": {"trickle_imin": 1.024, "trickle_k": 3, "etx_initial": 1.5},
        "energy": {"voltage": 3.3}
    })");
    const ScenarioConfig cfg = parse_scenario(doc);
    CHECK(cfg.id() == "demo");
    CHECK(cfg.topology == TopologyKind::Grid);
    CHECK(cfg.objective == ObjectiveKind::MrhofEtx);
    CHECK(cfg.rpl.objective == ObjectiveKind::MrhofEtx);
    CHECK(cfg.medium.rx_success_ratio == 0.8);
    CHECK(cfg.duration == SimTime{120'500'000});
    CHECK(cfg.seed == 99);
    CHECK(cfg.traffic_mix == std::vector<TrafficClass>{TrafficClass::LowCritical, TrafficClass::Critical});
    CHECK(cfg.traffic[index_of(TrafficClass::Critical)].mean_interval == from_seconds(7));
    CHECK(cfg.traffic[index_of(TrafficClass::Critical)].jitter == JitterMode::Fixed);
    CHECK(cfg.medium.tx_range_m == 80);
    CHECK(cfg.medium.max_transmissions == 3);
    CHECK(cfg.medium.backoff_slots == 16);
    REQUIRE(cfg.medium.link_ratios.size() == 1);
    CHECK(cfg.medium.link_ratios[0].ratio == 0.5);
    CHECK(cfg.rpl.trickle.i_min == SimTime{1'024'000});
    CHECK(cfg.rpl.trickle.redundancy_k == 3);
    CHECK(cfg.rpl.etx.initial_guess == 192);
    CHECK(cfg.energy.voltage == 3.3);
}

TEST_CASE("bad values are reported with their field")
{
    CHECK(error_field({{"rx_success_ratio", 1.5}}) == "rx_success_ratio");
    CHECK(error_field({{"rx_success_ratio", "high"}}) == "rx_success_ratio");
    CHECK(error_field({{"node_count", -3}}) == "node_count");
    CHECK(error_field({{"node_count", 1}}) == "node_count");
    CHECK(error_field({{"topology", "ring"}}) == "topology");
    CHECK(error_field({{"objective", "mrhof"}}) == "objective");
    CHECK(error_field({{"traffic_mix", json::array({"urgent"})}}) == "traffic_mix");
    CHECK(error_field({{"traffic", {{"urgent", {{"interval", 3}}}}}}) == "traffic.urgent");
    CHECK(error_field({{"traffic", {{"critical", {{"interval", 0}}}}}}) == "traffic.critical.interval");
    CHECK(error_field({{"medium", {{"tx_range", -5}}}}) == "medium.tx_range");
    CHECK(error_field({{"medium", {{"link_ratios", json::array({{{"a", 0}, {"b", 1}}})}}}}) ==
          "medium.link_ratios");
    CHECK(error_field({{"rpl", {{"etx_initial", 0.5}}}}) == "rpl.etx_initial");
    CHECK(error_field({{"energy", {{"tx_ma", -1}}}}) == "energy.tx_ma");
    CHECK(error_field({{"duration", 30}, {"warmup", 60}}) == "duration");
    CHECK(error_field(json::array()) == "<root>");
}

TEST_CASE("unknown keys are rejected at every level")
{
    CHECK(error_field({{"nodes", 5}}) == "nodes");
    CHECK(error_field({{"medium", {{"range", 5}}}}) == "medium.range");
    CHECK(error_field({{"rpl", {{"imin", 5}}}}) == "rpl.imin");
    CHECK(error_field({{"energy", {{"idle_ma", 5}}}}) == "energy.idle_ma");
}

TEST_CASE("a scenario survives a round trip through JSON")
{
    ScenarioConfig cfg;
    cfg.topology = TopologyKind::Grid;
    cfg.objective = ObjectiveKind::MrhofEtx;
    cfg.medium.rx_success_ratio = 0.8;
    cfg.medium.link_ratios.push_back({1, 2, 0.25});
    cfg.traffic_mix = {TrafficClass::Temperature};
    cfg.seed = 1234;
    const json doc = scenario_to_json(cfg);
    const ScenarioConfig back = parse_scenario(doc);
    CHECK(scenario_to_json(back) == doc);
    CHECK(back.id() == cfg.id());
}

TEST_CASE("missing files and malformed JSON are configuration errors")
{
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
    CHECK_THROWS_AS(parse_sweep(json::parse(R"({"node_counts": []})")), ConfigError);
}

TEST_CASE("a sweep expands to the Cartesian product with consecutive seeds")
{
    const json doc = json::parse(R"({
        "base": {"duration": 100, "warmup": 10},
        "node_counts": [10, 20], "objectives": ["of0", "etx"], "rx_ratios": [0.8, 1.0],
        "topologies": ["random", "grid"], "seeds_per_cell": 3, "base_seed": 40
    })");
    const SweepSpec spec = parse_sweep(doc);
    const auto runs = expand_sweep(spec);
    REQUIRE(runs.size() == 2 * 2 * 2 * 2 * 3);
    CHECK(runs[0].topology == TopologyKind::Random);
    CHECK(runs[0].objective == ObjectiveKind::Of0);
    CHECK(runs[0].seed == 40);
    CHECK(runs[1].seed == 41);
    CHECK(runs[2].seed == 42);
    CHECK(runs[3].node_count == 20);
    CHECK(runs.back().topology == TopologyKind::Grid);
    CHECK(runs.back().objective == ObjectiveKind::MrhofEtx);
    CHECK(runs.back().rpl.objective == ObjectiveKind::MrhofEtx);
    for (const auto &r : runs)
        CHECK(r.duration == from_seconds(100));
}

TEST_CASE("sweep errors name their field")
{
    auto field = [](const char *text) {
        try {
            parse_sweep(json::parse(text));
        } catch (const ConfigError &e) {
            return e.field();
        }
        return std::string("<no error>");
    };
    const char *ok = R"({"node_counts":[5],"objectives":["of0"],"rx_ratios":[1],"topologies":["grid"]})";
    CHECK(field(ok) == "<no error>");
    CHECK(field(R"({"node_counts":[5],"objectives":["of0"],"rx_ratios":[2],"topologies":["grid"]})") == "rx_ratios");
    CHECK(field(R"({"node_counts":[5],"objectives":["of0"],"rx_ratios":[1],"topologies":["grid"],
                    "seeds_per_cell":0})") == "seeds_per_cell");
    CHECK(field(R"({"node_counts":[5],"objectives":["of0"],"rx_ratios":[1],"topologies":["grid"],
                    "base":{"medium":{"speed":1}}})") == "medium.speed");
    CHECK(field(R"({"objectives":["of0"],"rx_ratios":[1],"topologies":["grid"]})") == "node_counts");
    CHECK(field(R"({"node_counts":[5],"objectives":["of0"],"rx_ratios":[1],"topologies":["grid"],"x":1})") == "x");
}

TEST_CASE("shipped configuration files parse")
{
    for (const char *name : {"grid20_of0.json", "grid20_etx.json", "smoke_sweep.json", "full_sweep.json",
                             "random100_etx_rx80.json", "low_critical_grid20.json"}) {
        INFO(name);
        const std::string path = std::string(RPLSIM_CONFIG_DIR) + "/" + name;
        const json doc = read_json_file(path);
        if (doc.contains("node_counts"))
            CHECK_NOTHROW(expand_sweep(parse_sweep(doc)));
        else
            CHECK_NOTHROW(parse_scenario(doc));
    }
}
