#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpbandits/bandit.hpp"
#include "dpbandits/csv.hpp"
#include "dpbandits/env.hpp"
#include "dpbandits/harness.hpp"
#include "dpbandits/stopping.hpp"
#include "dpbandits/tree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct StoppingRuleArgs {
    std::string algo = "dp-exp-nas";
    std::string stream = "bernoulli-pm1";
    double mu = 0.4;
    double support = 1.0;
    double alpha = 0.25;
    double beta = 0.05;
    double eps = 1.0;
    uint64_t max_samples = uint64_t{1} << 22;
    uint64_t seed = 1;
    bool zero_noise = false;
};

int run_stopping_rule(const StoppingRuleArgs& args) {
    dpb::StoppingRuleConfig cfg;
    cfg.support_halfwidth = args.support;
    cfg.alpha = args.alpha;
    cfg.beta = args.beta;
    cfg.max_samples = args.max_samples;
    if (args.algo != "nas") {
        cfg.epsilon = args.eps;
    }

    dpb::SampleStream stream;
    if (args.stream == "constant") {
        stream = dpb::constant_stream(args.mu);
    } else if (args.stream == "bernoulli-pm1") {
        stream = dpb::bernoulli_pm1_stream((args.mu + 1.0) / 2.0,
                                           dpb::NoiseSource(args.seed, 100));
    } else if (args.stream == "bernoulli01") {
        stream = dpb::bernoulli01_stream(args.mu, dpb::NoiseSource(args.seed, 100));
    } else {
        throw std::invalid_argument("unknown stream kind: " + args.stream);
    }

    dpb::NoiseSource noise(args.seed, 101, args.zero_noise);
    dpb::StoppingRuleOutcome out;
    if (args.algo == "nas") {
        out = dpb::nas_run(stream, cfg);
    } else if (args.algo == "dp-nas") {
        out = dpb::dp_nas_run(stream, cfg, noise);
    } else if (args.algo == "dp-exp-nas") {
        out = dpb::dp_exp_nas_run(stream, cfg, noise);
    } else {
        throw std::invalid_argument("unknown stopping-rule algorithm: " + args.algo);
    }

    std::printf("algorithm: %s\n", args.algo.c_str());
    std::printf("prng: %s (seed %llu)\n", dpb::NoiseSource::kGeneratorName,
                static_cast<unsigned long long>(args.seed));
    if (out.capped) {
        std::printf("capped: yes (no estimate released after %llu samples)\n",
                    static_cast<unsigned long long>(out.halt_time));
    } else {
        std::printf("halt_time: %llu\n", static_cast<unsigned long long>(out.halt_time));
        std::printf("estimate: %s\n", dpb::format_g10(*out.estimate).c_str());
    }
    return kExitOk;
}

void print_summaries(const std::vector<dpb::CellSummary>& cells) {
    std::printf("%-8s %-8s %5s %8s %12s %14s %12s %8s\n", "setting", "algo", "K", "eps", "T",
                "final_regret", "stderr", "opt_elim");
    for (const auto& s : cells) {
        std::printf("%-8s %-8s %5u %8s %12llu %14.2f %12.2f %8.2f\n", s.cell.setting.c_str(),
                    s.cell.algorithm.c_str(), s.cell.num_arms,
                    dpb::format_g10(s.cell.epsilon).c_str(),
                    static_cast<unsigned long long>(s.horizon), s.final_mean_regret(),
                    s.stderr_regret.empty() ? 0.0 : s.stderr_regret.back(),
                    s.optimal_eliminated_rate);
    }
}

int run_grid_command(const dpb::ExperimentConfig& cfg) {
    if (cfg.zero_noise && !cfg.output_dir.empty()) {
        std::fprintf(stderr,
                     "warning: zero-noise debug run; outputs are marked non-private\n");
    }
    const auto result = dpb::run_grid(cfg);
    print_summaries(result.cells);
    if (!cfg.output_dir.empty()) {
        std::printf("wrote %zu trace files + summary.csv/summary.json to %s\n",
                    result.trace_files.size(), cfg.output_dir.c_str());
    }
    return kExitOk;
}

int run_compare(const std::string& dir, const std::string& algo_a, const std::string& algo_b) {
    const auto rows = dpb::load_traces(dir);
    if (rows.empty()) {
        throw std::runtime_error("no trace files found in " + dir);
    }
    const auto report = dpb::compare_final_regret(rows, algo_a, algo_b);
    std::printf("final-regret ratio %s / %s (bootstrap 90%% interval over seeds)\n",
                algo_b.c_str(), algo_a.c_str());
    std::printf("%-8s %5s %8s %12s %10s %10s %10s\n", "setting", "K", "eps", "T", "ratio", "lo",
                "hi");
    std::string csv = "setting,K,epsilon,T,mean_a,mean_b,ratio,ratio_lo,ratio_hi\n";
    for (const auto& c : report) {
        std::printf("%-8s %5u %8s %12llu %10.3f %10.3f %10.3f\n", c.setting.c_str(), c.num_arms,
                    dpb::format_g10(c.epsilon).c_str(),
                    static_cast<unsigned long long>(c.horizon), c.ratio, c.ratio_lo, c.ratio_hi);
        csv += c.setting + "," + std::to_string(c.num_arms) + "," + dpb::format_g10(c.epsilon) +
               "," + std::to_string(c.horizon) + "," + dpb::format_g10(c.mean_a) + "," +
               dpb::format_g10(c.mean_b) + "," + dpb::format_g10(c.ratio) + "," +
               dpb::format_g10(c.ratio_lo) + "," + dpb::format_g10(c.ratio_hi) + "\n";
    }
    dpb::write_file_atomic(std::filesystem::path(dir) /
                               ("compare_" + algo_a + "_vs_" + algo_b + ".csv"),
                           csv);
    return kExitOk;
}

int run_selftest() {
    using Check = std::pair<const char*, std::function<bool()>>;
    const std::vector<Check> checks = {
        {"prng determinism", [] {
             dpb::NoiseSource a(99, 4), b(99, 4);
             for (int i = 0; i < 100'000; ++i) {
                 if (a.next_u64() != b.next_u64()) return false;
             }
             return true;
         }},
        {"laplace inverse cdf", [] {
             return dpb::laplace_inverse_cdf(0.5, dpb::LaplaceScale(3.0)) == 0.0 &&
                    std::fabs(dpb::laplace_inverse_cdf(0.75, dpb::LaplaceScale(1.0)) -
                              std::log(2.0)) < 1e-12;
         }},
        {"laplace tail + hoeffding radius", [] {
             return std::fabs(dpb::laplace_tail(2.0, dpb::LaplaceScale(2.0)) - std::exp(-1.0)) <
                        1e-12 &&
                    std::fabs(dpb::hoeffding_radius(200, 1.0, 0.05) -
                              std::sqrt(std::log(40.0) / 400.0)) < 1e-12;
         }},
        {"log-log threshold grid", [] {
             for (double a : {1.5, 2.0, 10.0}) {
                 for (double b : {1e-2, 1e-3, 1e-4}) {
                     const double x = std::log(a * std::log(1.0 / b)) / b;
                     if (!(dpb::fact1_lhs(a, x) > b)) return false;
                     if (!(dpb::fact1_lhs(a, 2.0 * x) < b)) return false;
                 }
             }
             return true;
         }},
        {"tree counter noise reuse", [] {
             dpb::TreeCounter counter(32, 1.0, dpb::NoiseSource(5, 0));
             for (int i = 0; i < 20; ++i) counter.add(0.5);
             const double first = counter.sum();
             for (int q = 0; q < 10; ++q) {
                 if (counter.sum() != first) return false;
             }
             dpb::TreeCounter exact(32, 1.0, dpb::NoiseSource(5, 0, true));
             for (int i = 0; i < 20; ++i) exact.add(0.5);
             return exact.sum() == 10.0;
         }},
        {"mean profiles", [] {
             return dpb::means_c2(5) == std::vector<double>{0.75, 0.625, 0.5, 0.375, 0.25} &&
                    std::fabs(dpb::means_c3(5)[1] - 0.53125) < 1e-12 &&
                    std::fabs(dpb::means_c4(5)[3] - 0.46875) < 1e-12;
         }},
        {"nas halting regression", [] {
             dpb::StoppingRuleConfig cfg;
             cfg.alpha = 1.0;
             cfg.beta = 0.1;
             cfg.max_samples = 1000;
             return dpb::nas_run(dpb::constant_stream(1.0), cfg).halt_time == 20;
         }},
        {"epoch length + elimination threshold", [] {
             if (dpb::epoch_length(5, 1, 0.1, 1.0) != 768) return false;
             auto state = dpb::make_epoch_state({0, 1}, 3, 0.1, 1.0);
             const double threshold = 2.0 * state.h_e + 2.0 * state.c_e;
             state.empirical_means = {0.9, 0.9 - threshold - 1e-9};
             dpb::NoiseSource zero(1, 0, true);
             return dpb::eliminate(state, zero).survivors == std::vector<uint32_t>{0};
         }},
        {"dp_se deterministic regression", [] {
             const dpb::BanditEnvironment env(dpb::means_c2(3), true);
             const auto trace =
                 dpb::dp_se_run(env, 0.01, 1.0, 30'000, dpb::NoiseSource(7, 0, true));
             return trace.final_regret() == 748.5 && trace.eliminations.size() == 2;
         }},
        {"csv round trip", [] {
             const std::vector<dpb::TraceRow> rows = {
                 {"c2", "dp_se", 5, 0.25, 1000, 42, 500, 12.5},
                 {"c2", "dp_se", 5, 0.25, 1000, 42, 1000, 20.25}};
             const auto parsed = dpb::parse_trace_csv(dpb::trace_csv(rows));
             return parsed.size() == 2 && parsed[1].cum_regret == 20.25 &&
                    parsed[0].seed == 42;
         }},
        {"grid reproducibility across thread counts", [] {
             dpb::ExperimentConfig cfg;
             cfg.settings = {"c2"};
             cfg.algorithms = {"dp_se"};
             cfg.arm_counts = {3};
             cfg.epsilons = {0.5};
             cfg.horizon = 5000;
             cfg.runs = 4;
             cfg.checkpoint_count = 5;
             cfg.threads = 1;
             const auto a = dpb::run_grid(cfg);
             cfg.threads = 4;
             const auto b = dpb::run_grid(cfg);
             return a.cells.size() == 1 && b.cells.size() == 1 &&
                    a.cells[0].mean_regret == b.cells[0].mean_regret;
         }},
    };

    int failures = 0;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            std::printf("FAIL %s (%s)\n", name, e.what());
            ++failures;
            continue;
        }
        std::printf("%s %s\n", ok ? "ok  " : "FAIL", name);
        failures += !ok;
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failures,
                checks.size());
    return failures == 0 ? kExitOk : kExitRuntimeError;
}

struct GridOverrides {
    std::optional<std::string> setting, algo, k, eps, horizon, out;
    std::optional<uint32_t> runs, threads, checkpoints;
    std::optional<uint64_t> seed;
    std::optional<double> beta;
    bool zero_noise = false;
    bool deterministic_env = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--setting", setting, "settings, comma separated (c1..c4)");
        cmd->add_option("--algo", algo, "algorithms, comma separated (dp_se,dp_ucb,se,ucb)");
        cmd->add_option("--k", k, "arm counts, comma separated");
        cmd->add_option("--eps", eps, "privacy budgets, comma separated");
        cmd->add_option("--horizon", horizon, "horizon T (accepts 1e6 notation)");
        cmd->add_option("--runs", runs, "seeded runs per cell");
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
        cmd->add_option("--checkpoints", checkpoints, "checkpoints per trace");
        cmd->add_option("--beta", beta, "confidence parameter (default 1/T)");
        cmd->add_flag("--zero-noise", zero_noise, "debug: silence all Laplace noise");
        cmd->add_flag("--deterministic-env", deterministic_env,
                      "debug: rewards equal the means");
    }

    void apply(dpb::ExperimentConfig& cfg) const {
        if (setting) cfg.settings = dpb::parse_config_text("settings = " + *setting).settings;
        if (algo) cfg.algorithms = dpb::parse_config_text("algorithms = " + *algo).algorithms;
        if (k) cfg.arm_counts = dpb::parse_config_text("k = " + *k).arm_counts;
        if (eps) cfg.epsilons = dpb::parse_config_text("eps = " + *eps).epsilons;
        if (horizon) cfg.horizon = dpb::parse_config_text("horizon = " + *horizon).horizon;
        if (runs) cfg.runs = *runs;
        if (seed) cfg.base_seed = *seed;
        if (out) cfg.output_dir = *out;
        if (threads) cfg.threads = *threads;
        if (checkpoints) cfg.checkpoint_count = *checkpoints;
        if (beta) cfg.beta = *beta;
        if (zero_noise) cfg.zero_noise = true;
        if (deterministic_env) cfg.deterministic_env = true;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentially private stopping rules and bandit experiment runner"};
    app.require_subcommand(1);

    auto* stopping = app.add_subcommand("stopping-rule", "stopping rule experiments");
    stopping->require_subcommand(1);
    auto* sr_run = stopping->add_subcommand("run", "run one stopping rule and print the outcome");
    StoppingRuleArgs sr_args;
    sr_run->add_option("--algo", sr_args.algo, "nas | dp-nas | dp-exp-nas");
    sr_run->add_option("--stream", sr_args.stream, "constant | bernoulli-pm1 | bernoulli01");
    sr_run->add_option("--mu", sr_args.mu, "stream mean");
    sr_run->add_option("--r", sr_args.support, "support half-width R");
    sr_run->add_option("--alpha", sr_args.alpha, "relative accuracy");
    sr_run->add_option("--beta", sr_args.beta, "failure probability");
    sr_run->add_option("--eps", sr_args.eps, "privacy budget");
    sr_run->add_option("--max-samples", sr_args.max_samples, "sample cap");
    sr_run->add_option("--seed", sr_args.seed, "seed");
    sr_run->add_flag("--zero-noise", sr_args.zero_noise, "debug: silence Laplace noise");

    auto* bandit = app.add_subcommand("bandit", "bandit experiments");
    bandit->require_subcommand(1);

    auto* b_run = bandit->add_subcommand("run", "run a single (setting, algo, K, eps) cell");
    GridOverrides run_overrides;
    run_overrides.attach(b_run);

    auto* b_grid = bandit->add_subcommand("grid", "run the full experiment grid");
    std::string config_path;
    b_grid->add_option("--config", config_path, "key=value config file");
    GridOverrides grid_overrides;
    grid_overrides.attach(b_grid);

    auto* b_compare = bandit->add_subcommand("compare", "final-regret ratio report");
    std::string cmp_dir;
    std::string cmp_a = "dp_se";
    std::string cmp_b = "dp_ucb";
    b_compare->add_option("--out", cmp_dir, "grid output directory to read traces from")
        ->required();
    b_compare->add_option("--algo-a", cmp_a, "denominator algorithm");
    b_compare->add_option("--algo-b", cmp_b, "numerator algorithm");

    auto* selftest = app.add_subcommand("selftest", "run the invariant self checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help and friends
        }
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (sr_run->parsed()) {
            return run_stopping_rule(sr_args);
        }
        if (b_run->parsed()) {
            dpb::ExperimentConfig cfg;
            cfg.runs = 1;
            cfg.output_dir.clear();
            run_overrides.apply(cfg);
            if (cfg.settings.size() != 1 || cfg.algorithms.size() != 1 ||
                cfg.arm_counts.size() != 1 || cfg.epsilons.size() != 1) {
                throw std::invalid_argument("bandit run: exactly one setting/algo/k/eps each");
            }
            return run_grid_command(cfg);
        }
        if (b_grid->parsed()) {
            dpb::ExperimentConfig cfg;
            if (!config_path.empty()) {
                cfg = dpb::parse_config_file(config_path);
            }
            grid_overrides.apply(cfg);
            return run_grid_command(cfg);
        }
        if (b_compare->parsed()) {
            return run_compare(cmp_dir, cmp_a, cmp_b);
        }
        if (selftest->parsed()) {
            return run_selftest();
        }
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntimeError;
    }
    return kExitOk;
}
