#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <unistd.h>

#include <CLI11.hpp>

#include "rplsim/config.hpp"
#include "rplsim/report.hpp"
#include "rplsim/simulation.hpp"

namespace {

using namespace rplsim;

std::ofstream open_output(const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path);
    return out;
}

void print_summary(const RunResult &run)
{
    const MetricsReport &m = run.metrics;
    const PacketCounters total = m.total();
    std::fprintf(stderr, "%s seed=%llu sent=%llu delivered=%llu pending=%llu", run.config.id().c_str(),
                 static_cast<unsigned long long>(run.config.seed), static_cast<unsigned long long>(total.sent),
                 static_cast<unsigned long long>(total.delivered), static_cast<unsigned long long>(total.pending));
    if (auto pdr = m.pdr_total())
        std::fprintf(stderr, " pdr=%.4f", *pdr);
    std::fprintf(stderr, " power=%.4fmW", m.avg_power_mw);
    if (m.convergence_s)
        std::fprintf(stderr, " converged=%.2fs", *m.convergence_s);
    else
        std::fprintf(stderr, " converged=never");
    std::fprintf(stderr, "\n");
}

int cmd_run(const std::string &config_path, std::optional<std::uint64_t> seed, const std::string &out_path,
            const std::string &trace_path)
{
    ScenarioConfig cfg = load_scenario(config_path);
    if (seed)
        cfg.seed = *seed;

    std::optional<std::ofstream> trace;
    if (!trace_path.empty())
        trace = open_output(trace_path);
    const RunResult run = run_scenario(cfg, trace ? &*trace : nullptr);
    print_summary(run);

    if (out_path.empty()) {
        write_results_csv(std::cout, {run});
    } else {
        std::ofstream out = open_output(out_path);
        write_results_csv(out, {run});
    }
    return 0;
}

int cmd_sweep(const std::string &spec_path, unsigned parallel, const std::string &out_path)
{
    const std::vector<ScenarioConfig> configs = expand_sweep(load_sweep(spec_path));
    std::fprintf(stderr, "sweep: %zu runs on %u threads\n", configs.size(), parallel);
    // a live counter on terminals, a line per tenth of the sweep otherwise
    const bool tty = isatty(fileno(stderr));
    const SweepOutcome outcome = run_sweep(configs, parallel, [tty](std::size_t done, std::size_t total) {
        if (tty) {
            std::fprintf(stderr, "\r%zu/%zu", done, total);
            if (done == total)
                std::fprintf(stderr, "\n");
        } else if (done == total || done * 10 / total != (done - 1) * 10 / total) {
            std::fprintf(stderr, "%zu/%zu\n", done, total);
        }
    });

    {
        std::ofstream out = open_output(out_path);
        write_results_csv(out, outcome.runs);
    }
    {
        std::ofstream out = open_output(out_path + ".summary.csv");
        write_summary_csv(out, outcome.runs);
    }
    if (!outcome.failures.empty()) {
        std::ofstream out = open_output(out_path + ".errors.csv");
        write_csv_row(out, {"index", "scenario_id", "seed", "error"});
        for (const SweepFailure &f : outcome.failures)
            write_csv_row(out, {std::to_string(f.index), f.scenario_id, std::to_string(f.seed), f.message});
        std::fprintf(stderr, "sweep: %zu runs failed, see %s.errors.csv\n", outcome.failures.size(),
                     out_path.c_str());
        return 3;
    }
    return 0;
}

int cmd_plot_data(const std::string &in_path, const std::string &figure_name, const std::string &out_path)
{
    std::ifstream in(in_path);
    if (!in)
        throw ConfigError("cannot open " + in_path);
    const CsvTable table = read_csv(in);
    const auto figure = figure_from_string(figure_name);
    if (!figure)
        throw ConfigError("expected pdr or power", "figure");
    std::ofstream out = open_output(out_path);
    write_plot_data(out, table, *figure);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Discrete-event simulator of RPL upward routing under healthcare traffic"};
    app.require_subcommand(1);

    std::string config_path, run_out, trace_path;
    std::optional<std::uint64_t> seed;
    CLI::App *run = app.add_subcommand("run", "Simulate one scenario and write a one-row results CSV");
    run->add_option("--config", config_path, "Scenario JSON")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", run_out, "Results CSV (default: stdout)");
    run->add_option("--trace", trace_path, "Write a JSON-lines event trace");

    std::string spec_path, sweep_out;
    unsigned parallel = std::max(1u, std::thread::hardware_concurrency());
    CLI::App *sweep = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep->add_option("--spec", spec_path, "Sweep JSON")->required();
    sweep->add_option("--parallel", parallel, "Worker threads")->check(CLI::Range(1u, 1024u));
    sweep->add_option("--out", sweep_out, "Results CSV")->required();

    std::string plot_in, plot_out, figure;
    CLI::App *plot = app.add_subcommand("plot-data", "Reshape sweep results into plot series");
    plot->add_option("--in", plot_in, "Results CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--figure", figure, "pdr or power")->required()->check(CLI::IsMember({"pdr", "power"}));
    plot->add_option("--out", plot_out, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config_path, seed, run_out, trace_path);
        if (*sweep)
            return cmd_sweep(spec_path, parallel, sweep_out);
        return cmd_plot_data(plot_in, figure, plot_out);
    } catch (const ConfigError &e) {
        if (e.field().empty())
            std::fprintf(stderr, "error: %s\n", e.what());
        else
            std::fprintf(stderr, "error: %s: %s\n", e.field().c_str(), e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
