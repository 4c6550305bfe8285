#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpbandits/bandit.hpp"
#include "dpbandits/csv.hpp"

namespace dpb {

/// Full experiment grid: (setting x algorithm x K x epsilon) cells, each run
/// with `runs` independently seeded repetitions.
struct ExperimentConfig {
    std::vector<std::string> settings = {"c2"};
    std::vector<std::string> algorithms = {"dp_se", "dp_ucb"};
    std::vector<uint32_t> arm_counts = {5};
    std::vector<double> epsilons = {0.25};
    uint64_t horizon = 1'000'000;
    uint32_t runs = 10;
    uint64_t base_seed = 20240901;
    uint32_t checkpoint_count = 100;
    std::string output_dir;
    uint32_t threads = 0;            // 0: hardware concurrency
    bool zero_noise = false;         // debug: all Laplace draws forced to 0
    bool deterministic_env = false;  // debug: rewards equal the arm means
    std::optional<double> beta;      // elimination confidence; defaults to 1/horizon

    double beta_value() const { return beta ? *beta : 1.0 / static_cast<double>(horizon); }
    void validate() const;

    /// Canonical key=value rendering; echoed into output metadata.
    std::string resolved_text() const;
};

/// key=value config document; '#' starts a comment, lists are comma-separated.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::string& path);

/// One grid cell.
struct CellId {
    std::string setting;
    std::string algorithm;
    uint32_t num_arms = 0;
    double epsilon = 0.0;  // NaN when no privacy axis applies

    std::string label() const;
};

struct CellSummary {
    CellId cell;
    uint64_t horizon = 0;
    uint32_t runs = 0;
    double beta = 0.0;
    std::vector<uint64_t> checkpoint_times;
    std::vector<double> mean_regret;        // per checkpoint, arithmetic over runs
    std::vector<double> stderr_regret;      // sample std / sqrt(runs)
    std::vector<double> mean_pulls;         // per arm
    double optimal_eliminated_rate = 0.0;

    double final_mean_regret() const { return mean_regret.empty() ? 0.0 : mean_regret.back(); }
};

struct GridResult {
    std::vector<CellSummary> cells;
    std::vector<std::string> trace_files;   // file names inside output_dir, cell-major order
};

/// Deterministic per-run seed: base_seed XOR FNV-1a of the canonical cell/run
/// label. Depends only on cell identity, never on execution order.
uint64_t cell_seed(uint64_t base_seed, const CellId& cell, uint32_t run_index);

std::string trace_filename(const CellId& cell, uint32_t run_index);

/// One (cell, run) execution with the config's debug flags applied.
RunTrace run_cell_once(const ExperimentConfig& cfg, const CellId& cell, uint32_t run_index);

/// Checkpoint rows of one run, in trace-CSV form.
std::vector<TraceRow> trace_rows(const CellId& cell, const RunTrace& trace);

/// Executes every (cell, run) task over a worker pool, writes one trace CSV
/// per run plus summary.csv / summary.json / resolved_config.txt into
/// cfg.output_dir (if set), and returns the aggregated summaries. Output is
/// byte-identical for identical configs regardless of thread count.
GridResult run_grid(const ExperimentConfig& cfg);

/// Final-regret ratio of algo_b over algo_a within each cell that carries
/// both algorithms, with a percentile-bootstrap 90% interval over runs.
struct CellComparison {
    std::string setting;
    uint32_t num_arms = 0;
    double epsilon = 0.0;
    uint64_t horizon = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double ratio = 0.0;     // mean_b / mean_a
    double ratio_lo = 0.0;  // 5th percentile
    double ratio_hi = 0.0;  // 95th percentile
};

std::vector<CellComparison> compare_final_regret(const std::vector<TraceRow>& rows,
                                                 const std::string& algo_a,
                                                 const std::string& algo_b);

/// All trace rows found in a grid output directory.
std::vector<TraceRow> load_traces(const std::string& dir);

}  // namespace dpb
