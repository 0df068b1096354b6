#include "rplsim/simulation.hpp"

#include <memory>

#include "rplsim/engine.hpp"

namespace rplsim {

namespace {

class TraceWriter
{
public:
    explicit TraceWriter(std::ostream &out) : out_(out) {}

    void header(const ScenarioConfig &cfg)
    {
        out_ << R"({"type":"header","scenario":")" << cfg.id() << R"(","nodes":)" << cfg.node_count
             << R"(,"seed":)" << cfg.seed << R"(,"duration_us":)" << cfg.duration.count() << "}\n";
    }

    void event(const EventRecord &rec)
    {
        out_ << R"({"type":"event","t":)" << rec.fire_time.count() << R"(,"seq":)" << rec.sequence
             << R"(,"kind":")" << to_string(rec.kind) << R"(","target":)";
        if (rec.target == kMediumTarget)
            out_ << "null";
        else
            out_ << rec.target;
        out_ << "}\n";
    }

    void radio(SimTime t, NodeId node, RadioState state)
    {
        out_ << R"({"type":"radio","t":)" << t.count() << R"(,"node":)" << node << R"(,"state":")"
             << to_string(state) << "\"}\n";
    }

    void end(SimTime t) { out_ << R"({"type":"end","t":)" << t.count() << "}\n"; }

private:
    std::ostream &out_;
};

} // namespace

RunResult run_scenario(const ScenarioConfig &cfg, std::ostream *trace)
{
    cfg.validate();

    RunResult result;
    result.config = cfg;
    result.topology = generate_topology(cfg);
    const std::size_t n = result.topology.positions.size();

    std::vector<NodeId> sensors;
    for (NodeId id = 0; id < n; ++id) {
        if (id != result.topology.sink)
            sensors.push_back(id);
    }
    const std::vector<TrafficClass> classes = assign_traffic_classes(sensors, cfg.traffic_mix);

    std::vector<NodeState> nodes;
    nodes.reserve(n);
    for (NodeId id = 0, s = 0; id < n; ++id) {
        if (id == result.topology.sink)
            nodes.push_back(make_sink(id, result.topology.positions[id]));
        else
            nodes.push_back(make_sensor(id, result.topology.positions[id], classes[s++]));
    }

    Engine engine;
    EnergyMeter meter(n);
    std::unique_ptr<TraceWriter> writer;
    if (trace) {
        writer = std::make_unique<TraceWriter>(*trace);
        writer->header(cfg);
        engine.set_observer([w = writer.get()](const EventRecord &rec) { w->event(rec); });
        meter.set_observer([w = writer.get()](SimTime t, NodeId node, RadioState s) { w->radio(t, node, s); });
    }

    Medium medium(engine, result.topology.positions, cfg.medium, derive_stream(cfg.seed, StreamPurpose::Medium),
                  meter);
    Mac mac(engine, medium, cfg.seed);
    MetricsReport &report = result.metrics;
    PacketTracker packets(report);
    RplConfig rpl = cfg.rpl;
    rpl.objective = cfg.objective;
    RplNetwork network(engine, mac, std::move(nodes), rpl, cfg.seed, packets, cfg.medium.max_transmissions);

    // traffic generation: first send one interval draw after warmup
    const SimTime traffic_stop = cfg.duration - cfg.drain;
    std::vector<RandomStream> traffic_streams;
    traffic_streams.reserve(n);
    for (NodeId id = 0; id < n; ++id)
        traffic_streams.push_back(derive_stream(cfg.seed, StreamPurpose::Traffic, id));

    std::function<void(NodeId, SimTime)> schedule_send = [&](NodeId id, SimTime after) {
        const TrafficProfile &profile = cfg.traffic[index_of(network.node(id).traffic_class)];
        const SimTime at = next_send_time(profile, after, traffic_streams[id]);
        if (at >= traffic_stop)
            return;
        engine.schedule(at, EventKind::AppSend, id, [&, id] {
            network.originate(id, network.node(id).traffic_class, engine.now() >= cfg.warmup);
            schedule_send(id, engine.now());
        });
    };
    for (NodeId id : sensors)
        schedule_send(id, cfg.warmup);

    network.start();
    engine.run_until(cfg.duration);
    meter.finish(cfg.duration);
    packets.finalize();
    if (writer)
        writer->end(cfg.duration);

    result.final_nodes.assign(network.nodes().begin(), network.nodes().end());
    result.events_executed = engine.executed_count();
    result.ledgers.reserve(n);
    report.node_power_mw.reserve(n);
    double sensor_power = 0.0;
    for (NodeId id = 0; id < n; ++id) {
        const EnergyLedger &ledger = meter.ledger(id);
        result.ledgers.push_back(ledger);
        const double power = average_power_mw(ledger, cfg.energy, cfg.duration);
        report.node_power_mw.push_back(power);
        if (id != result.topology.sink) {
            sensor_power += power;
            report.total_energy_mj += energy_mj(ledger, cfg.energy);
        }
    }
    report.avg_power_mw = sensors.empty() ? 0.0 : sensor_power / static_cast<double>(sensors.size());
    if (auto t = convergence_time(network.membership_log(), sensors.size()))
        report.convergence_s = to_seconds(*t);
    report.dio_count = network.dio_sent();
    report.dis_count = network.dis_sent();
    return result;
}

} // namespace rplsim
