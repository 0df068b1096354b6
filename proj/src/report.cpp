#include "rplsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rplsim {

namespace {

std::string fmt(double v, const char *spec = "%.6f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string opt(const std::optional<double> &v)
{
    return v ? fmt(*v) : std::string{};
}

bool needs_quotes(const std::string &s)
{
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

struct Stats
{
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

Stats stats_of(const std::vector<double> &xs)
{
    Stats s;
    s.n = xs.size();
    if (xs.empty())
        return s;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double sq = 0.0;
        for (double x : xs)
            sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
    }
    return s;
}

} // namespace

const std::vector<std::string> &result_columns()
{
    static const std::vector<std::string> columns{
        "scenario_id",     "topology",      "objective",    "rx_ratio",     "node_count",       "seed",
        "duration_s",      "warmup_s",      "convergence_s", "pdr_total",   "pdr_high_critical", "pdr_critical",
        "pdr_low_critical", "pdr_temperature", "avg_power_mw", "total_energy_mj", "dio_count",     "dis_count",
        "drops_no_route",  "drops_mac",     "drops_queue",  "drops_ttl"};
    return columns;
}

std::vector<std::string> result_fields(const RunResult &run)
{
    const ScenarioConfig &cfg = run.config;
    const MetricsReport &m = run.metrics;
    const PacketCounters total = m.total();
    return {
        cfg.id(),
        std::string(to_string(cfg.topology)),
        std::string(to_string(cfg.objective)),
        fmt(cfg.medium.rx_success_ratio, "%.4g"),
        std::to_string(cfg.node_count),
        std::to_string(cfg.seed),
        fmt(to_seconds(cfg.duration), "%.6g"),
        fmt(to_seconds(cfg.warmup), "%.6g"),
        opt(m.convergence_s),
        opt(m.pdr_total()),
        opt(m.pdr(TrafficClass::HighCritical)),
        opt(m.pdr(TrafficClass::Critical)),
        opt(m.pdr(TrafficClass::LowCritical)),
        opt(m.pdr(TrafficClass::Temperature)),
        fmt(m.avg_power_mw),
        fmt(m.total_energy_mj),
        std::to_string(m.dio_count),
        std::to_string(m.dis_count),
        std::to_string(total.drops_of(DropCause::NoRoute)),
        std::to_string(total.drops_of(DropCause::MacFailure)),
        std::to_string(total.drops_of(DropCause::QueueOverflow)),
        std::to_string(total.drops_of(DropCause::Ttl)),
    };
}

void write_csv_row(std::ostream &out, const std::vector<std::string> &fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        const std::string &f = fields[i];
        if (!needs_quotes(f)) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"')
                out << '"';
            out << c;
        }
        out << '"';
    }
    out << '\n';
}

void write_results_csv(std::ostream &out, const std::vector<RunResult> &runs)
{
    write_csv_row(out, result_columns());
    for (const RunResult &run : runs)
        write_csv_row(out, result_fields(run));
}

std::optional<std::size_t> CsvTable::column(const std::string &name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

const std::string &CsvTable::at(std::size_t row, const std::string &name) const
{
    const auto col = column(name);
    if (!col)
        throw ConfigError("missing CSV column", name);
    const auto &record = rows.at(row);
    if (*col >= record.size())
        throw ConfigError("short CSV record " + std::to_string(row + 1), name);
    return record[*col];
}

CsvTable read_csv(std::istream &in)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted)
        throw ConfigError("unterminated quoted CSV field");
    if (any) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    CsvTable table;
    if (records.empty())
        throw ConfigError("empty CSV input");
    table.header = std::move(records.front());
    table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return table;
}

SweepOutcome run_sweep(const std::vector<ScenarioConfig> &configs, unsigned parallel,
                       const std::function<void(std::size_t, std::size_t)> &progress)
{
    const std::size_t total = configs.size();
    std::vector<std::optional<RunResult>> slots(total);
    std::vector<std::optional<std::string>> errors(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                slots[i] = run_scenario(configs[i]);
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, total);
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    SweepOutcome outcome;
    for (std::size_t i = 0; i < total; ++i) {
        if (slots[i])
            outcome.runs.push_back(std::move(*slots[i]));
        else
            outcome.failures.push_back({i, configs[i].id(), configs[i].seed, errors[i].value_or("unknown error")});
    }
    return outcome;
}

void write_summary_csv(std::ostream &out, const std::vector<RunResult> &runs)
{
    struct Cell
    {
        std::vector<std::string> key;
        std::vector<double> pdr;
        std::vector<double> power;
    };
    std::vector<Cell> cells;
    std::map<std::vector<std::string>, std::size_t> index;
    for (const RunResult &run : runs) {
        const ScenarioConfig &cfg = run.config;
        std::vector<std::string> key{cfg.id(), std::string(to_string(cfg.topology)),
                                     std::string(to_string(cfg.objective)), fmt(cfg.medium.rx_success_ratio, "%.4g"),
                                     std::to_string(cfg.node_count)};
        auto [it, inserted] = index.try_emplace(key, cells.size());
        if (inserted)
            cells.push_back({key, {}, {}});
        Cell &cell = cells[it->second];
        if (auto p = run.metrics.pdr_total())
            cell.pdr.push_back(*p);
        cell.power.push_back(run.metrics.avg_power_mw);
    }
    write_csv_row(out, {"scenario_id", "topology", "objective", "rx_ratio", "node_count", "runs", "pdr_mean",
                        "pdr_stddev", "avg_power_mw_mean", "avg_power_mw_stddev"});
    for (const Cell &cell : cells) {
        const Stats pdr = stats_of(cell.pdr);
        const Stats power = stats_of(cell.power);
        std::vector<std::string> row = cell.key;
        row.push_back(std::to_string(power.n));
        row.push_back(pdr.n ? fmt(pdr.mean) : "");
        row.push_back(pdr.n ? fmt(pdr.stddev) : "");
        row.push_back(fmt(power.mean));
        row.push_back(fmt(power.stddev));
        write_csv_row(out, row);
    }
}

std::optional<Figure> figure_from_string(const std::string &name)
{
    if (name == "pdr")
        return Figure::Pdr;
    if (name == "power")
        return Figure::Power;
    return std::nullopt;
}

void write_plot_data(std::ostream &out, const CsvTable &results, Figure figure)
{
    std::vector<std::pair<std::string, std::string>> metrics; // (column, label)
    if (figure == Figure::Pdr) {
        metrics = {{"pdr_total", "total"},
                   {"pdr_high_critical", "high-critical"},
                   {"pdr_critical", "critical"},
                   {"pdr_low_critical", "low-critical"},
                   {"pdr_temperature", "temperature"}};
    } else {
        metrics = {{"avg_power_mw", "avg"}};
    }
    for (const char *required : {"topology", "objective", "rx_ratio", "node_count"}) {
        if (!results.column(required))
            throw ConfigError("missing CSV column", required);
    }
    for (const auto &m : metrics) {
        if (!results.column(m.first))
            throw ConfigError("missing CSV column", m.first);
    }

    struct Key
    {
        std::string topology, objective, rx, metric;
        long node_count;
        auto operator<=>(const Key &) const = default;
    };
    std::map<Key, std::vector<double>> groups;
    for (std::size_t r = 0; r < results.rows.size(); ++r) {
        long n;
        try {
            n = std::stol(results.at(r, "node_count"));
        } catch (const std::exception &) {
            throw ConfigError("bad node_count in record " + std::to_string(r + 1), "node_count");
        }
        for (const auto &[column, label] : metrics) {
            const std::string &cell = results.at(r, column);
            if (cell.empty())
                continue;
            double v;
            try {
                v = std::stod(cell);
            } catch (const std::exception &) {
                throw ConfigError("bad number in record " + std::to_string(r + 1), column);
            }
            groups[{results.at(r, "topology"), results.at(r, "objective"), results.at(r, "rx_ratio"), label, n}]
                .push_back(v);
        }
    }

    write_csv_row(out, {"figure", "series", "topology", "objective", "rx_ratio", "metric", "node_count", "runs", "mean",
                        "stddev"});
    const std::string fig = figure == Figure::Pdr ? "pdr" : "power";
    for (const auto &[key, values] : groups) {
        std::string series = key.topology + "-" + key.objective + "-rx" + key.rx;
        if (figure == Figure::Pdr)
            series += "-" + key.metric;
        const Stats s = stats_of(values);
        write_csv_row(out, {fig, series, key.topology, key.objective, key.rx, key.metric, std::to_string(key.node_count),
                            std::to_string(s.n), fmt(s.mean), fmt(s.stddev)});
    }
}

} // namespace rplsim
