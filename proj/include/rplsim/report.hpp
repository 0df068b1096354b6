#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rplsim/simulation.hpp"

namespace rplsim {

/// Column order of the per-run CSV.
const std::vector<std::string> &result_columns();

/// One CSV record per run; absent values become empty fields.
std::vector<std::string> result_fields(const RunResult &run);

void write_csv_row(std::ostream &out, const std::vector<std::string> &fields);
void write_results_csv(std::ostream &out, const std::vector<RunResult> &runs);

/// A parsed results CSV: header plus records, keyed by column name.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string &name) const;
    const std::string &at(std::size_t row, const std::string &name) const;
};

CsvTable read_csv(std::istream &in);

struct SweepFailure
{
    std::size_t index;
    std::string scenario_id;
    std::uint64_t seed;
    std::string message;
};

struct SweepOutcome
{
    std::vector<RunResult> runs; ///< successful runs, in input order
    std::vector<SweepFailure> failures;
};

/// Runs every configuration on up to `parallel` worker threads. The output
/// does not depend on `parallel`. `progress` is called after each run,
/// possibly from a worker thread.
SweepOutcome run_sweep(const std::vector<ScenarioConfig> &configs, unsigned parallel,
                       const std::function<void(std::size_t done, std::size_t total)> &progress = {});

/// Per cell (all columns but seed): run count, mean and sample standard
/// deviation of the total PDR and average power.
void write_summary_csv(std::ostream &out, const std::vector<RunResult> &runs);

enum class Figure
{
    Pdr,
    Power,
};

std::optional<Figure> figure_from_string(const std::string &name);

/// Long-format series for plotting: one row per (series, node_count) with
/// mean and standard deviation across seeds. Series are
/// "<topology>-<objective>-rx<percent>[-<class>]".
void write_plot_data(std::ostream &out, const CsvTable &results, Figure figure);

} // namespace rplsim
