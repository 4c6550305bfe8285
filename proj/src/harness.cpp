#include "dpbandits/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "dpbandits/env.hpp"

namespace dpb {

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

uint64_t fnv1a64(std::string_view text) {
    uint64_t h = kFnvOffset;
    for (unsigned char c : text) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

const std::vector<std::string> kKnownAlgorithms = {"dp_se", "dp_ucb", "se", "ucb"};

bool known_algorithm(const std::string& name) {
    return std::find(kKnownAlgorithms.begin(), kKnownAlgorithms.end(), name) !=
           kKnownAlgorithms.end();
}

std::string eps_label(double epsilon) {
    return std::isnan(epsilon) ? "na" : format_g10(epsilon);
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(',');
        out += items[i];
    }
    return out;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> items;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        std::string item(text.substr(start, comma - start));
        // trim
        while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.erase(0, 1);
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.pop_back();
        if (!item.empty()) items.push_back(std::move(item));
        start = comma + 1;
    }
    return items;
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: bad boolean value: " + value);
}

uint64_t parse_u64(const std::string& value) {
    const double d = std::stod(value);  // accepts 1e6-style horizons
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
        throw std::invalid_argument("config: bad integer value: " + value);
    }
    return static_cast<uint64_t>(d);
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "settings" || key == "setting") {
        cfg.settings = split_list(value);
    } else if (key == "algorithms" || key == "algo") {
        cfg.algorithms = split_list(value);
    } else if (key == "k") {
        cfg.arm_counts.clear();
        for (const auto& item : split_list(value)) {
            cfg.arm_counts.push_back(static_cast<uint32_t>(parse_u64(item)));
        }
    } else if (key == "eps") {
        cfg.epsilons.clear();
        for (const auto& item : split_list(value)) {
            cfg.epsilons.push_back(std::stod(item));
        }
    } else if (key == "horizon") {
        cfg.horizon = parse_u64(value);
    } else if (key == "runs") {
        cfg.runs = static_cast<uint32_t>(parse_u64(value));
    } else if (key == "base_seed") {
        cfg.base_seed = parse_u64(value);
    } else if (key == "checkpoints") {
        cfg.checkpoint_count = static_cast<uint32_t>(parse_u64(value));
    } else if (key == "out") {
        cfg.output_dir = value;
    } else if (key == "threads") {
        cfg.threads = static_cast<uint32_t>(parse_u64(value));
    } else if (key == "zero_noise") {
        cfg.zero_noise = parse_bool(value);
    } else if (key == "deterministic_env") {
        cfg.deterministic_env = parse_bool(value);
    } else if (key == "beta") {
        cfg.beta = std::stod(value);
    } else {
        throw std::invalid_argument("config: unknown key: " + key);
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (settings.empty() || algorithms.empty() || arm_counts.empty() || epsilons.empty()) {
        throw std::invalid_argument("config: settings/algorithms/k/eps must be non-empty");
    }
    for (const auto& s : settings) {
        (void)means_for_setting(s, 2);  // throws on unknown names
    }
    for (const auto& a : algorithms) {
        if (!known_algorithm(a)) {
            throw std::invalid_argument("config: unknown algorithm: " + a);
        }
    }
    for (uint32_t k : arm_counts) {
        if (k < 2) throw std::invalid_argument("config: k must be >= 2");
        if (horizon < k) throw std::invalid_argument("config: horizon must be >= every k");
    }
    for (double e : epsilons) {
        if (!(e > 0.0)) throw std::invalid_argument("config: eps must be > 0");
    }
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (checkpoint_count < 2) throw std::invalid_argument("config: checkpoints must be >= 2");
    if (beta && (!(*beta > 0.0) || !(*beta < 1.0))) {
        throw std::invalid_argument("config: beta must lie in (0,1)");
    }
}

std::string ExperimentConfig::resolved_text() const {
    std::ostringstream out;
    out << "settings = " << join_list(settings) << "\n";
    out << "algorithms = " << join_list(algorithms) << "\n";
    out << "k = ";
    for (size_t i = 0; i < arm_counts.size(); ++i) out << (i ? "," : "") << arm_counts[i];
    out << "\n";
    out << "eps = ";
    for (size_t i = 0; i < epsilons.size(); ++i) out << (i ? "," : "") << format_g10(epsilons[i]);
    out << "\n";
    out << "horizon = " << horizon << "\n";
    out << "runs = " << runs << "\n";
    out << "base_seed = " << base_seed << "\n";
    out << "checkpoints = " << checkpoint_count << "\n";
    out << "beta = " << format_g10(beta_value()) << "\n";
    out << "threads = " << threads << "\n";
    out << "zero_noise = " << (zero_noise ? "true" : "false") << "\n";
    out << "deterministic_env = " << (deterministic_env ? "true" : "false") << "\n";
    if (!output_dir.empty()) {
        out << "out = " << output_dir << "\n";
    }
    return out.str();
}

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig cfg;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (!blank) throw std::invalid_argument("config: bad line: " + line);
            continue;
        }
        auto trim = [](std::string s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(0, 1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.pop_back();
            return s;
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

std::string CellId::label() const {
    return setting + "|" + algorithm + "|K=" + std::to_string(num_arms) + "|eps=" +
           eps_label(epsilon);
}

uint64_t cell_seed(uint64_t base_seed, const CellId& cell, uint32_t run_index) {
    return base_seed ^ fnv1a64(cell.label() + "|run=" + std::to_string(run_index));
}

std::string trace_filename(const CellId& cell, uint32_t run_index) {
    char run[16];
    std::snprintf(run, sizeof(run), "%03u", run_index);
    return "trace_" + cell.setting + "_" + cell.algorithm + "_K" + std::to_string(cell.num_arms) +
           "_eps" + eps_label(cell.epsilon) + "_run" + run + ".csv";
}

RunTrace run_cell_once(const ExperimentConfig& cfg, const CellId& cell, uint32_t run_index) {
    const BanditEnvironment env(means_for_setting(cell.setting, cell.num_arms),
                                cfg.deterministic_env);
    const uint64_t seed = cell_seed(cfg.base_seed, cell, run_index);
    NoiseSource root(seed, 0, cfg.zero_noise);
    const auto checkpoints = evenly_spaced_checkpoints(cfg.horizon, cfg.checkpoint_count);
    const double beta = cfg.beta_value();
    if (cell.algorithm == "dp_se") {
        return dp_se_run(env, beta, cell.epsilon, cfg.horizon, root, checkpoints);
    }
    if (cell.algorithm == "se") {
        return se_run(env, beta, cfg.horizon, root, checkpoints);
    }
    if (cell.algorithm == "dp_ucb") {
        return dp_ucb_run(env, cell.epsilon, cfg.horizon, root, checkpoints);
    }
    if (cell.algorithm == "ucb") {
        return ucb_run(env, cfg.horizon, root, checkpoints);
    }
    throw std::invalid_argument("unknown algorithm: " + cell.algorithm);
}

std::vector<TraceRow> trace_rows(const CellId& cell, const RunTrace& trace) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.checkpoints.size());
    for (const auto& cp : trace.checkpoints) {
        rows.push_back(TraceRow{cell.setting, cell.algorithm, cell.num_arms, cell.epsilon,
                                trace.horizon, trace.seed, cp.t, cp.cum_regret});
    }
    return rows;
}

GridResult run_grid(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<CellId> cells;
    for (const auto& setting : cfg.settings) {
        for (const auto& algo : cfg.algorithms) {
            for (uint32_t k : cfg.arm_counts) {
                for (double eps : cfg.epsilons) {
                    cells.push_back(CellId{setting, algo, k, eps});
                }
            }
        }
    }

    const bool write_output = !cfg.output_dir.empty();
    const std::filesystem::path out_dir(cfg.output_dir);
    if (write_output) {
        std::filesystem::create_directories(out_dir);
    }

    struct Task {
        size_t cell_index;
        uint32_t run_index;
    };
    std::vector<Task> tasks;
    tasks.reserve(cells.size() * cfg.runs);
    for (size_t c = 0; c < cells.size(); ++c) {
        for (uint32_t r = 0; r < cfg.runs; ++r) {
            tasks.push_back(Task{c, r});
        }
    }

    std::vector<RunTrace> traces(tasks.size());
    std::atomic<size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= tasks.size()) {
                return;
            }
            try {
                const Task& task = tasks[i];
                RunTrace trace = run_cell_once(cfg, cells[task.cell_index], task.run_index);
                if (write_output) {
                    write_file_atomic(
                        out_dir / trace_filename(cells[task.cell_index], task.run_index),
                        trace_csv(trace_rows(cells[task.cell_index], trace)));
                }
                traces[i] = std::move(trace);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
            }
        }
    };

    uint32_t num_threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
    num_threads = std::max<uint32_t>(1, std::min<uint32_t>(num_threads,
                                                           static_cast<uint32_t>(tasks.size())));
    if (num_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(num_threads);
        for (uint32_t i = 0; i < num_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failed.load()) {
        throw std::runtime_error("grid run failed: " + failure);
    }

    // Deterministic aggregation in cell-major order.
    GridResult result;
    std::vector<SummaryRow> summary_rows;
    for (size_t c = 0; c < cells.size(); ++c) {
        CellSummary summary;
        summary.cell = cells[c];
        summary.horizon = cfg.horizon;
        summary.runs = cfg.runs;
        summary.beta = cfg.beta_value();

        const RunTrace& first = traces[c * cfg.runs];
        summary.checkpoint_times.reserve(first.checkpoints.size());
        for (const auto& cp : first.checkpoints) {
            summary.checkpoint_times.push_back(cp.t);
        }
        const size_t num_cp = summary.checkpoint_times.size();
        summary.mean_regret.assign(num_cp, 0.0);
        summary.stderr_regret.assign(num_cp, 0.0);
        summary.mean_pulls.assign(cells[c].num_arms, 0.0);

        const BanditEnvironment env(means_for_setting(cells[c].setting, cells[c].num_arms));
        uint32_t optimal_eliminated = 0;
        for (uint32_t r = 0; r < cfg.runs; ++r) {
            const RunTrace& trace = traces[c * cfg.runs + r];
            for (size_t i = 0; i < num_cp; ++i) {
                summary.mean_regret[i] += trace.checkpoints[i].cum_regret;
            }
            for (uint32_t a = 0; a < cells[c].num_arms; ++a) {
                summary.mean_pulls[a] += static_cast<double>(trace.pulls[a]);
            }
            if (trace.was_eliminated(env.optimal_arm())) {
                ++optimal_eliminated;
            }
        }
        for (double& m : summary.mean_regret) m /= cfg.runs;
        for (double& m : summary.mean_pulls) m /= cfg.runs;
        summary.optimal_eliminated_rate = static_cast<double>(optimal_eliminated) / cfg.runs;
        if (cfg.runs > 1) {
            for (size_t i = 0; i < num_cp; ++i) {
                double ss = 0.0;
                for (uint32_t r = 0; r < cfg.runs; ++r) {
                    const double d =
                        traces[c * cfg.runs + r].checkpoints[i].cum_regret - summary.mean_regret[i];
                    ss += d * d;
                }
                summary.stderr_regret[i] =
                    std::sqrt(ss / (cfg.runs - 1)) / std::sqrt(static_cast<double>(cfg.runs));
            }
        }

        for (size_t i = 0; i < num_cp; ++i) {
            summary_rows.push_back(SummaryRow{cells[c].setting, cells[c].algorithm,
                                              cells[c].num_arms, cells[c].epsilon, cfg.horizon,
                                              summary.checkpoint_times[i], summary.mean_regret[i],
                                              summary.stderr_regret[i]});
        }
        result.cells.push_back(std::move(summary));
        for (uint32_t r = 0; r < cfg.runs; ++r) {
            result.trace_files.push_back(trace_filename(cells[c], r));
        }
    }

    if (write_output) {
        write_file_atomic(out_dir / "summary.csv", summary_csv(summary_rows));

        nlohmann::json doc;
        doc["prng"] = NoiseSource::kGeneratorName;
        doc["privacy"] = cfg.zero_noise ? "zero-noise-debug" : "event-level-dp";
        doc["config"] = cfg.resolved_text();
        doc["cells"] = nlohmann::json::array();
        for (const CellSummary& s : result.cells) {
            nlohmann::json cell;
            cell["setting"] = s.cell.setting;
            cell["algorithm"] = s.cell.algorithm;
            cell["K"] = s.cell.num_arms;
            if (std::isnan(s.cell.epsilon)) {
                cell["epsilon"] = nullptr;
            } else {
                cell["epsilon"] = s.cell.epsilon;
            }
            cell["T"] = s.horizon;
            cell["runs"] = s.runs;
            cell["beta"] = s.beta;
            cell["checkpoints"] = s.checkpoint_times;
            cell["mean_regret"] = s.mean_regret;
            cell["stderr_regret"] = s.stderr_regret;
            cell["mean_pulls"] = s.mean_pulls;
            cell["optimal_eliminated_rate"] = s.optimal_eliminated_rate;
            doc["cells"].push_back(std::move(cell));
        }
        write_file_atomic(out_dir / "summary.json", doc.dump(2) + "\n");
        write_file_atomic(out_dir / "resolved_config.txt", cfg.resolved_text());
    }
    return result;
}

std::vector<CellComparison> compare_final_regret(const std::vector<TraceRow>& rows,
                                                 const std::string& algo_a,
                                                 const std::string& algo_b) {
    struct Key {
        std::string setting;
        uint32_t num_arms;
        std::string eps;
        uint64_t horizon;
        bool operator<(const Key& o) const {
            return std::tie(setting, num_arms, eps, horizon) <
                   std::tie(o.setting, o.num_arms, o.eps, o.horizon);
        }
    };
    // final regret per (cell, algorithm, seed)
    std::map<Key, std::map<std::string, std::map<uint64_t, std::pair<uint64_t, double>>>> cells;
    for (const TraceRow& row : rows) {
        if (row.algorithm != algo_a && row.algorithm != algo_b) {
            continue;
        }
        Key key{row.setting, row.num_arms, eps_label(row.epsilon), row.horizon};
        auto& best = cells[key][row.algorithm][row.seed];
        if (row.t >= best.first) {
            best = {row.t, row.cum_regret};
        }
    }

    std::vector<CellComparison> report;
    for (auto& [key, algos] : cells) {
        auto ita = algos.find(algo_a);
        auto itb = algos.find(algo_b);
        if (ita == algos.end() || itb == algos.end()) {
            throw std::runtime_error("compare: cell " + key.setting + "/K=" +
                                     std::to_string(key.num_arms) + "/eps=" + key.eps +
                                     " missing one of the algorithms");
        }
        auto finals = [](const std::map<uint64_t, std::pair<uint64_t, double>>& by_seed) {
            std::vector<double> v;
            v.reserve(by_seed.size());
            for (const auto& [seed, tf] : by_seed) v.push_back(tf.second);
            return v;
        };
        const std::vector<double> fa = finals(ita->second);
        const std::vector<double> fb = finals(itb->second);
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };

        CellComparison cmp;
        cmp.setting = key.setting;
        cmp.num_arms = key.num_arms;
        cmp.epsilon = key.eps == "na" ? std::numeric_limits<double>::quiet_NaN()
                                      : std::stod(key.eps);
        cmp.horizon = key.horizon;
        cmp.mean_a = mean(fa);
        cmp.mean_b = mean(fb);
        cmp.ratio = cmp.mean_b / cmp.mean_a;

        // Percentile bootstrap keyed by (cell, algorithm name) so swapping the
        // arguments reuses the same resamples and yields reciprocal intervals.
        constexpr int kReps = 1000;
        const std::string cell_key = key.setting + "|" + std::to_string(key.num_arms) + "|" +
                                     key.eps + "|" + std::to_string(key.horizon);
        NoiseSource sa(fnv1a64(cell_key + "|" + algo_a), 0);
        NoiseSource sb(fnv1a64(cell_key + "|" + algo_b), 0);
        auto resample_mean = [](const std::vector<double>& v, NoiseSource& src) {
            double s = 0.0;
            for (size_t i = 0; i < v.size(); ++i) {
                s += v[src.next_u64() % v.size()];
            }
            return s / static_cast<double>(v.size());
        };
        std::vector<double> ratios;
        ratios.reserve(kReps);
        for (int rep = 0; rep < kReps; ++rep) {
            ratios.push_back(resample_mean(fb, sb) / resample_mean(fa, sa));
        }
        std::sort(ratios.begin(), ratios.end());
        cmp.ratio_lo = ratios[static_cast<size_t>(0.05 * kReps)];
        cmp.ratio_hi = ratios[static_cast<size_t>(0.95 * kReps) - 1];
        report.push_back(std::move(cmp));
    }
    return report;
}

std::vector<TraceRow> load_traces(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<TraceRow> rows;
    for (const auto& file : files) {
        auto parsed = parse_trace_csv(read_file(file));
        rows.insert(rows.end(), parsed.begin(), parsed.end());
    }
    return rows;
}

}  // namespace dpb
