#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "rplsim/medium.hpp"

using namespace rplsim;

namespace {

struct Channel
{
    Engine engine;
    EnergyMeter meter;
    Medium medium;

    Channel(std::vector<Position> positions, MediumConfig cfg = {}, std::uint64_t seed = 1)
        : meter(positions.size()),
          medium(engine, std::move(positions), std::move(cfg), derive_stream(seed, StreamPurpose::Medium), meter)
    {
    }
};

Frame data_frame(const MediumConfig &cfg = {})
{
    Frame f;
    f.type = FrameType::Data;
    f.bytes = cfg.data_header_bytes + cfg.data_payload_bytes;
    return f;
}

MediumConfig with_ratio(double p)
{
    MediumConfig cfg;
    cfg.rx_success_ratio = p;
    return cfg;
}

} // namespace

TEST_CASE("unit disk range is closed")
{
    const MediumConfig cfg;
    CHECK(in_range({0, 0}, {0, 0}, cfg));
    CHECK(in_range({0, 0}, {100, 0}, cfg));
    CHECK(in_range({0, 0}, {60, 80}, cfg));
    CHECK_FALSE(in_range({0, 0}, {100.01, 0}, cfg));
}

TEST_CASE("airtime follows frame size and bitrate")
{
    Channel ch({{0, 0}, {50, 0}});
    CHECK(ch.medium.airtime(64) == SimTime{2240});
    CHECK(ch.medium.airtime(50) == SimTime{1792});
    CHECK(ch.medium.airtime(5) == SimTime{352});
}

TEST_CASE("medium configuration is validated with field names")
{
    auto field_of = [](MediumConfig cfg) {
        try {
            cfg.validate();
        } catch (const ConfigError &e) {
            return e.field();
        }
        return std::string{};
    };
    MediumConfig cfg;
    CHECK(field_of(cfg).empty());
    cfg.rx_success_ratio = 1.2;
    CHECK(field_of(cfg) == "rx_success_ratio");
    cfg = {};
    cfg.tx_range_m = 0;
    CHECK(field_of(cfg) == "tx_range");
    cfg = {};
    cfg.max_transmissions = 0;
    CHECK(field_of(cfg) == "max_transmissions");
    cfg = {};
    cfg.link_ratios.push_back({0, 1, -0.1});
    CHECK(field_of(cfg) == "link_ratios");
}

TEST_CASE("a lone frame on a perfect channel is delivered to everyone in range")
{
    Channel ch({{0, 0}, {50, 0}, {-50, 0}, {0, 90}, {500, 500}});
    std::vector<ReceptionOutcome> got;
    Frame f = data_frame();
    f.dst = kNoNode;
    ch.medium.transmit(0, f, [&](const Transmission &, std::span<const ReceptionOutcome> out) {
        got.assign(out.begin(), out.end());
    });
    ch.engine.run_until(from_seconds(1));
    REQUIRE(got.size() == 3);
    for (const auto &o : got) {
        CHECK(o.receiver != 0); // never receives its own frame
        CHECK(o.receiver != 4);
        CHECK(o.result == Reception::Delivered);
    }
}

TEST_CASE("a frame with nobody in range still costs the sender")
{
    Channel ch({{0, 0}, {500, 0}});
    std::size_t outcomes = 99;
    ch.medium.transmit(0, data_frame(), [&](const Transmission &, std::span<const ReceptionOutcome> out) {
        outcomes = out.size();
    });
    ch.engine.run_until(from_seconds(1));
    ch.meter.finish(from_seconds(1));
    CHECK(outcomes == 0);
    CHECK(ch.meter.ledger(0).t_tx == SimTime{1792});
    CHECK(ch.meter.ledger(1).radio_on() == SimTime{0});
}

TEST_CASE("overlapping frames collide at a shared receiver")
{
    // 0 and 2 cannot hear each other, 1 hears both
    Channel ch({{0, 0}, {90, 0}, {180, 0}});
    std::map<NodeId, Reception> at_middle;
    auto record = [&](const Transmission &tx, std::span<const ReceptionOutcome> out) {
        for (const auto &o : out) {
            if (o.receiver == 1)
                at_middle[tx.sender] = o.result;
        }
    };
    ch.medium.transmit(0, data_frame(), record);
    ch.engine.schedule(SimTime{500}, EventKind::TxStart, 2, [&] { ch.medium.transmit(2, data_frame(), record); });
    ch.engine.run_until(from_seconds(1));
    CHECK(at_middle.at(0) == Reception::LostCollision);
    CHECK(at_middle.at(2) == Reception::LostCollision);
}

TEST_CASE("back-to-back frames do not collide")
{
    Channel ch({{0, 0}, {90, 0}, {180, 0}});
    std::vector<Reception> results;
    auto record = [&](const Transmission &, std::span<const ReceptionOutcome> out) {
        for (const auto &o : out) {
            if (o.receiver == 1)
                results.push_back(o.result);
        }
    };
    ch.medium.transmit(0, data_frame(), record);
    ch.engine.schedule(SimTime{1792}, EventKind::TxStart, 2, [&] { ch.medium.transmit(2, data_frame(), record); });
    ch.engine.run_until(from_seconds(1));
    CHECK(results == std::vector<Reception>{Reception::Delivered, Reception::Delivered});
}

TEST_CASE("a transmitting node cannot receive")
{
    Channel ch({{0, 0}, {50, 0}});
    std::vector<Reception> results;
    auto record = [&](const Transmission &, std::span<const ReceptionOutcome> out) {
        for (const auto &o : out)
            results.push_back(o.result);
    };
    ch.medium.transmit(0, data_frame(), record);
    ch.medium.transmit(1, data_frame(), record);
    CHECK(ch.medium.channel_busy(0));
    CHECK(ch.medium.transmitting(1));
    ch.engine.run_until(from_seconds(1));
    CHECK(results == std::vector<Reception>{Reception::LostCollision, Reception::LostCollision});
}

TEST_CASE("broadcast delivery counts follow the binomial law")
{
    // 4 receivers at ratio 0.8, 5000 frames
    Channel ch({{0, 0}, {50, 0}, {-50, 0}, {0, 50}, {0, -50}}, with_ratio(0.8), 11);
    std::vector<std::uint64_t> histogram(5, 0);
    for (int i = 0; i < 5000; ++i) {
        ch.engine.schedule(SimTime{i * 10'000}, EventKind::TxStart, 0, [&] {
            ch.medium.transmit(0, data_frame(), [&](const Transmission &, std::span<const ReceptionOutcome> out) {
                unsigned k = 0;
                for (const auto &o : out)
                    k += o.result == Reception::Delivered;
                ++histogram[k];
            });
        });
    }
    ch.engine.run_until(from_seconds(100));
    std::vector<double> expected;
    for (unsigned k = 0; k <= 4; ++k)
        expected.push_back(oracle::binomial_pmf(4, k, 0.8));
    // 4 degrees of freedom, 0.1% critical value 18.47
    CHECK(oracle::chi_square(histogram, expected) < 18.47);
}

TEST_CASE("per-link ratios override the global ratio symmetrically")
{
    MediumConfig cfg;
    cfg.link_ratios.push_back({1, 2, 0.0});
    Channel ch({{0, 0}, {50, 0}, {100, 0}}, cfg);
    CHECK(ch.medium.link_ratio(1, 2) == 0.0);
    CHECK(ch.medium.link_ratio(2, 1) == 0.0);
    CHECK(ch.medium.link_ratio(0, 1) == 1.0);
    std::map<NodeId, Reception> from_1;
    ch.medium.transmit(1, data_frame(), [&](const Transmission &, std::span<const ReceptionOutcome> out) {
        for (const auto &o : out)
            from_1[o.receiver] = o.result;
    });
    ch.engine.run_until(from_seconds(1));
    CHECK(from_1.at(0) == Reception::Delivered);
    CHECK(from_1.at(2) == Reception::LostRandom);
}

namespace {

struct MacChannel : Channel
{
    Mac mac;

    MacChannel(std::vector<Position> positions, MediumConfig cfg = {}, std::uint64_t seed = 1)
        : Channel(std::move(positions), cfg, seed), mac(engine, medium, seed)
    {
    }

    UnicastResult send(NodeId from, NodeId to)
    {
        UnicastResult result;
        bool done = false;
        mac.unicast(from, to, data_frame(medium.config()), [&](UnicastResult r) {
            result = r;
            done = true;
        });
        engine.run_until(engine.now() + from_seconds(10));
        REQUIRE(done);
        return result;
    }
};

} // namespace

TEST_CASE("unicast on an idle perfect link succeeds first time")
{
    MacChannel ch({{0, 0}, {50, 0}});
    int received = 0;
    ch.mac.set_receive_handler([&](NodeId at, const Frame &f) {
        CHECK(at == 1);
        CHECK(f.src == 0);
        ++received;
    });
    const UnicastResult r = ch.send(0, 1);
    CHECK(r.success);
    CHECK(r.attempts_used == 1);
    CHECK(received == 1);
}

TEST_CASE("unicast over a dead link uses every attempt")
{
    MacChannel ch({{0, 0}, {50, 0}}, with_ratio(0.0));
    const UnicastResult r = ch.send(0, 1);
    CHECK_FALSE(r.success);
    CHECK(r.attempts_used == 4);
}

TEST_CASE("radio-on time of an exchange is its frames plus listening windows")
{
    MacChannel ch({{0, 0}, {50, 0}});
    ch.send(0, 1);
    ch.meter.finish(ch.engine.now());
    const MediumConfig &cfg = ch.medium.config();
    const EnergyLedger &sender = ch.meter.ledger(0);
    const EnergyLedger &receiver = ch.meter.ledger(1);
    CHECK(sender.t_tx == ch.medium.airtime(50));
    CHECK(sender.t_rx == cfg.ack_wait); // the ACK arrives inside the wait
    CHECK(receiver.t_rx == ch.medium.airtime(50));
    CHECK(receiver.t_tx == ch.medium.airtime(cfg.ack_frame_bytes));
    CHECK(sender.cpu_total() == ch.engine.now());
    CHECK(receiver.cpu_total() == ch.engine.now());
}

TEST_CASE("retransmitted frames are passed up at most once")
{
    MediumConfig cfg = with_ratio(0.8);
    int passes_up = 0;
    int exchanges = 0;
    int total_attempts = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        MacChannel ch({{0, 0}, {50, 0}}, cfg, seed);
        ch.mac.set_receive_handler([&](NodeId, const Frame &) { ++passes_up; });
        const UnicastResult r = ch.send(0, 1);
        ++exchanges;
        total_attempts += static_cast<int>(r.attempts_used);
    }
    CHECK(passes_up <= exchanges);
    CHECK(total_attempts > exchanges);
}

TEST_CASE("mean unicast attempts match the truncated geometric expectation")
{
    const double p = 0.8;
    MacChannel ch({{0, 0}, {50, 0}}, with_ratio(p), 5);
    const int trials = 10'000;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    for (int i = 0; i < trials; ++i) {
        const UnicastResult r = ch.send(0, 1);
        attempts += r.attempts_used;
        successes += r.success;
        REQUIRE(r.attempts_used >= 1);
        REQUIRE(r.attempts_used <= 4);
    }
    const double expected = oracle::truncated_geometric_mean(p * p, 4);
    CHECK(static_cast<double>(attempts) / trials == doctest::Approx(expected).epsilon(0.02));
    const double success_rate = 1.0 - std::pow(1.0 - p * p, 4);
    CHECK(static_cast<double>(successes) / trials == doctest::Approx(success_rate).epsilon(0.01));
}

TEST_CASE("the enumerator reproduces the closed form")
{
    for (double p : {0.1, 0.64, 1.0}) {
        double closed = 0.0;
        for (unsigned k = 1; k <= 4; ++k)
            closed += k * p * std::pow(1.0 - p, k - 1);
        closed += 4 * std::pow(1.0 - p, 4);
        CHECK(oracle::truncated_geometric_mean(p, 4) == doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK(oracle::truncated_geometric_mean(0.0, 4) == doctest::Approx(4.0));
}

TEST_CASE("contending senders back off and both get through")
{
    MacChannel ch({{0, 0}, {50, 0}, {100, 0}});
    int delivered = 0;
    ch.mac.set_receive_handler([&](NodeId at, const Frame &) { delivered += at == 1; });
    int done = 0;
    ch.mac.unicast(0, 1, data_frame(), [&](UnicastResult r) { done += r.success; });
    ch.mac.unicast(2, 1, data_frame(), [&](UnicastResult r) { done += r.success; });
    CHECK(ch.mac.busy(0));
    CHECK_THROWS_AS(ch.mac.unicast(0, 1, data_frame(), {}), ContractViolation);
    ch.engine.run_until(from_seconds(10));
    CHECK(done == 2);
    CHECK(delivered == 2);
    CHECK_FALSE(ch.mac.busy(0));
}
