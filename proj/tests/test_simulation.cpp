#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "rplsim/report.hpp"
#include "rplsim/simulation.hpp"

using namespace rplsim;

namespace {

ScenarioConfig scenario(TopologyKind topo, ObjectiveKind of, double rx, std::size_t n, std::uint64_t seed)
{
    ScenarioConfig cfg;
    cfg.topology = topo;
    cfg.objective = of;
    cfg.medium.rx_success_ratio = rx;
    cfg.node_count = n;
    cfg.seed = seed;
    cfg.duration = from_seconds(400);
    return cfg;
}

std::vector<ScenarioConfig> mixed_runs()
{
    std::vector<ScenarioConfig> out;
    std::uint64_t seed = 1;
    for (TopologyKind t : {TopologyKind::Random, TopologyKind::Grid}) {
        for (ObjectiveKind o : {ObjectiveKind::Of0, ObjectiveKind::MrhofEtx}) {
            for (double rx : {0.8, 1.0})
                out.push_back(scenario(t, o, rx, 30, seed++));
        }
    }
    return out;
}

} // namespace

TEST_CASE("every packet is delivered, dropped or pending")
{
    for (const ScenarioConfig &cfg : mixed_runs()) {
        INFO(cfg.id());
        const RunResult r = run_scenario(cfg);
        for (const PacketCounters &c : r.metrics.per_class)
            CHECK(c.sent == c.delivered + c.dropped() + c.pending);
        CHECK(r.metrics.total().sent > 0);
    }
}

TEST_CASE("energy ledgers partition the run exactly")
{
    for (const ScenarioConfig &cfg : mixed_runs()) {
        INFO(cfg.id());
        const RunResult r = run_scenario(cfg);
        for (const EnergyLedger &l : r.ledgers) {
            CHECK(l.t_cpu_active + l.t_lpm == cfg.duration);
            CHECK(l.t_tx + l.t_rx <= cfg.duration);
            CHECK(l.t_cpu_active == l.radio_on());
        }
    }
}

TEST_CASE("final routing state is a loop-free tree with monotone ranks")
{
    for (const ScenarioConfig &cfg : mixed_runs()) {
        INFO(cfg.id());
        const RunResult r = run_scenario(cfg);
        CHECK(is_routing_tree(r.final_nodes));
        for (const NodeState &node : r.final_nodes) {
            if (node.is_sink()) {
                CHECK(node.rank == kRootRank);
                continue;
            }
            CHECK(node.trickle.current_interval >= cfg.rpl.trickle.i_min);
            CHECK(node.trickle.current_interval <= cfg.rpl.trickle.i_max());
            if (!node.preferred_parent)
                continue;
            CHECK(node.candidate_parents.contains(*node.preferred_parent));
            CHECK(node.rank > node.candidate_parents.at(*node.preferred_parent).advertised_rank);
        }
    }
}

TEST_CASE("a connected 20-node random network joins within a minute")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioConfig cfg = scenario(TopologyKind::Random, ObjectiveKind::Of0, 1.0, 20, seed);
        cfg.duration = from_seconds(120);
        const RunResult r = run_scenario(cfg);
        REQUIRE(r.metrics.convergence_s.has_value());
        CHECK(*r.metrics.convergence_s < 60.0);
    }
}

TEST_CASE("the same scenario and seed reproduce the same trace and row")
{
    const ScenarioConfig cfg = scenario(TopologyKind::Random, ObjectiveKind::MrhofEtx, 0.8, 20, 9);
    std::ostringstream a, b;
    const RunResult ra = run_scenario(cfg, &a);
    const RunResult rb = run_scenario(cfg, &b);
    CHECK(a.str() == b.str());
    CHECK(result_fields(ra) == result_fields(rb));
    ScenarioConfig other = cfg;
    other.seed = 10;
    std::ostringstream c;
    run_scenario(other, &c);
    CHECK(a.str() != c.str());
}

TEST_CASE("replaying the trace reproduces the energy ledgers and power")
{
    const ScenarioConfig cfg = scenario(TopologyKind::Grid, ObjectiveKind::Of0, 0.8, 16, 4);
    std::stringstream trace;
    const RunResult r = run_scenario(cfg, &trace);
    const oracle::ReplayedTrace replay = oracle::replay_trace(trace, cfg.node_count);
    CHECK(replay.end_time_us == cfg.duration.count());
    CHECK(replay.event_records == r.events_executed);
    for (NodeId id = 0; id < cfg.node_count; ++id) {
        CHECK(replay.ledgers[id] == r.ledgers[id]);
        CHECK(average_power_mw(replay.ledgers[id], cfg.energy, cfg.duration) == r.metrics.node_power_mw[id]);
        CHECK(oracle::power_mw(replay.ledgers[id], cfg.energy, cfg.duration.count()) ==
              doctest::Approx(r.metrics.node_power_mw[id]).epsilon(1e-12));
    }
}

TEST_CASE("reported power averages sensors and energy sums them")
{
    const ScenarioConfig cfg = scenario(TopologyKind::Grid, ObjectiveKind::Of0, 1.0, 9, 2);
    const RunResult r = run_scenario(cfg);
    double sum = 0;
    double energy = 0;
    for (NodeId id = 1; id < cfg.node_count; ++id) {
        sum += r.metrics.node_power_mw[id];
        energy += energy_mj(r.ledgers[id], cfg.energy);
    }
    CHECK(r.metrics.avg_power_mw == doctest::Approx(sum / 8).epsilon(1e-12));
    CHECK(r.metrics.total_energy_mj == doctest::Approx(energy).epsilon(1e-12));
    // an idle mote draws 0.1635 mW; radio activity only adds to that
    CHECK(r.metrics.avg_power_mw > 0.1635);
}

TEST_CASE("warmup traffic is not counted")
{
    ScenarioConfig cfg = scenario(TopologyKind::Grid, ObjectiveKind::Of0, 1.0, 9, 2);
    cfg.warmup = SimTime{0};
    const RunResult early = run_scenario(cfg);
    cfg.warmup = from_seconds(200);
    const RunResult late = run_scenario(cfg);
    CHECK(late.metrics.total().sent < early.metrics.total().sent);
}

TEST_CASE("traffic sends follow each class law in a real run")
{
    ScenarioConfig cfg = scenario(TopologyKind::Grid, ObjectiveKind::Of0, 1.0, 9, 3);
    cfg.duration = from_seconds(1000);
    std::stringstream trace;
    const RunResult r = run_scenario(cfg, &trace);
    const oracle::ReplayedTrace replay = oracle::replay_trace(trace, cfg.node_count);
    for (const auto &[node, times] : replay.app_sends) {
        const TrafficClass cls = r.final_nodes[node].traffic_class;
        REQUIRE_FALSE(times.empty());
        CHECK(times.front() >= cfg.warmup.count());
        for (std::size_t i = 1; i < times.size(); ++i) {
            const std::int64_t gap = times[i] - times[i - 1];
            if (cls == TrafficClass::LowCritical) {
                CHECK(gap == 300'000'000);
            } else {
                const std::int64_t mean = cfg.traffic[index_of(cls)].mean_interval.count();
                CHECK(gap >= mean / 2);
                CHECK(gap <= mean * 3 / 2);
            }
        }
    }
}

TEST_CASE("a dead link set leaves its node out of the DODAG")
{
    ScenarioConfig cfg = scenario(TopologyKind::Grid, ObjectiveKind::Of0, 1.0, 9, 1);
    cfg.traffic_mix = {TrafficClass::HighCritical};
    // cut node 8 (a corner) off from everyone
    for (NodeId other = 0; other < 8; ++other)
        cfg.medium.link_ratios.push_back({8, other, 0.0});
    const RunResult r = run_scenario(cfg);
    CHECK_FALSE(r.final_nodes[8].joined());
    CHECK_FALSE(r.metrics.convergence_s.has_value());
    CHECK(r.metrics.total().drops_of(DropCause::NoRoute) > 0);
}
