#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpbandits/harness.hpp"

using namespace dpb;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dpbandits_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig small_grid_config() {
    ExperimentConfig cfg;
    cfg.settings = {"c2"};
    cfg.algorithms = {"dp_se", "se"};
    cfg.arm_counts = {3};
    cfg.epsilons = {0.5};
    cfg.horizon = 8000;
    cfg.runs = 3;
    cfg.checkpoint_count = 4;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("trace csv round trip on a fixture set") {
    const std::vector<TraceRow> rows = {
        {"c2", "dp_se", 5, 0.25, 1000000, 42, 10000, 748.5},
        {"c2", "dp_se", 5, 0.25, 1000000, 42, 1000000, 20000.25},
        {"c3", "ucb", 3, std::numeric_limits<double>::quiet_NaN(), 500, 7, 500, 0.21875},
    };
    const std::string text = trace_csv(rows);
    const auto parsed = parse_trace_csv(text);
    REQUIRE(parsed.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].setting == rows[i].setting);
        CHECK(parsed[i].algorithm == rows[i].algorithm);
        CHECK(parsed[i].num_arms == rows[i].num_arms);
        CHECK(parsed[i].horizon == rows[i].horizon);
        CHECK(parsed[i].seed == rows[i].seed);
        CHECK(parsed[i].t == rows[i].t);
        CHECK(parsed[i].cum_regret == rows[i].cum_regret);
        if (std::isnan(rows[i].epsilon)) {
            CHECK(std::isnan(parsed[i].epsilon));
        } else {
            CHECK(parsed[i].epsilon == rows[i].epsilon);
        }
    }
    // one trace with 3 checkpoints -> 3 data rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("empty row sets emit header-only files") {
    CHECK(trace_csv({}) == "setting,algorithm,K,epsilon,T,seed,t,cum_regret\n");
    CHECK(summary_csv({}) == "setting,algorithm,K,epsilon,T,t,mean_regret,stderr_regret\n");
    CHECK(parse_trace_csv(trace_csv({})).empty());
    CHECK(parse_summary_csv(summary_csv({})).empty());
    CHECK_THROWS_AS(parse_trace_csv("bogus,header\n"), std::runtime_error);
}

TEST_CASE("config text parsing, defaults and validation") {
    const auto cfg = parse_config_text(
        "# experiment file\n"
        "settings = c1, c3\n"
        "algorithms = dp_se,dp_ucb\n"
        "k = 3,5\n"
        "eps = 0.1, 0.25\n"
        "horizon = 1e5\n"
        "runs = 7\n"
        "checkpoints = 50\n"
        "base_seed = 99\n"
        "zero_noise = true\n"
        "beta = 0.001\n");
    CHECK(cfg.settings == std::vector<std::string>{"c1", "c3"});
    CHECK(cfg.algorithms == std::vector<std::string>{"dp_se", "dp_ucb"});
    CHECK(cfg.arm_counts == std::vector<uint32_t>{3, 5});
    CHECK(cfg.epsilons == std::vector<double>{0.1, 0.25});
    CHECK(cfg.horizon == 100'000);
    CHECK(cfg.runs == 7);
    CHECK(cfg.checkpoint_count == 50);
    CHECK(cfg.base_seed == 99);
    CHECK(cfg.zero_noise);
    CHECK(cfg.beta.has_value());
    cfg.validate();

    CHECK(ExperimentConfig{}.beta_value() == 1e-6);  // default beta = 1/T

    CHECK_THROWS_AS(parse_config_text("unknown_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("horizon\n"), std::invalid_argument);

    ExperimentConfig bad = small_grid_config();
    bad.settings = {"c7"};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_grid_config();
    bad.algorithms = {"thompson"};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_grid_config();
    bad.checkpoint_count = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_grid_config();
    bad.horizon = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("cell seeds depend only on cell identity") {
    const CellId cell{"c2", "dp_se", 5, 0.25};
    CHECK(cell_seed(1, cell, 0) == cell_seed(1, cell, 0));
    CHECK(cell_seed(1, cell, 0) != cell_seed(1, cell, 1));
    CHECK(cell_seed(1, cell, 0) != cell_seed(2, cell, 0));
    const CellId other{"c2", "dp_se", 5, 0.5};
    CHECK(cell_seed(1, cell, 0) != cell_seed(1, other, 0));
    const CellId ucb_cell{"c2", "ucb", 5, std::numeric_limits<double>::quiet_NaN()};
    CHECK(cell_seed(1, ucb_cell, 0) == cell_seed(1, ucb_cell, 0));
}

TEST_CASE("checkpoint schedules are increasing and end at the horizon") {
    for (uint64_t horizon : {10ull, 1000ull, 999'983ull}) {
        for (uint32_t count : {2u, 7u, 100u}) {
            const auto cps = evenly_spaced_checkpoints(horizon, count);
            REQUIRE_FALSE(cps.empty());
            CHECK(cps.back() == horizon);
            for (size_t i = 1; i < cps.size(); ++i) {
                CHECK(cps[i] > cps[i - 1]);
            }
        }
    }
}

TEST_CASE("grid counting: cells times runs trace files, one summary per cell") {
    ExperimentConfig cfg;
    cfg.settings = {"c1", "c2"};
    cfg.algorithms = {"dp_se", "se"};
    cfg.arm_counts = {3};
    cfg.epsilons = {0.5, 1.0};
    cfg.horizon = 3000;
    cfg.runs = 3;
    cfg.checkpoint_count = 3;
    const auto dir = fresh_dir("counting");
    cfg.output_dir = dir.string();
    const auto result = run_grid(cfg);
    CHECK(result.cells.size() == 8);
    CHECK(result.trace_files.size() == 24);
    size_t files_on_disk = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        files_on_disk += entry.path().filename().string().rfind("trace_", 0) == 0;
    }
    CHECK(files_on_disk == 24);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "resolved_config.txt"));
    fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical regardless of thread count") {
    auto cfg = small_grid_config();
    const auto dir1 = fresh_dir("threads1");
    const auto dir2 = fresh_dir("threads2");
    cfg.threads = 1;
    cfg.output_dir = dir1.string();
    const auto first = run_grid(cfg);
    cfg.threads = 4;
    cfg.output_dir = dir2.string();
    run_grid(cfg);
    for (const auto& name : first.trace_files) {
        CHECK(read_file(dir1 / name) == read_file(dir2 / name));
    }
    CHECK(read_file(dir1 / "summary.csv") == read_file(dir2 / "summary.csv"));
    // summary.json echoes the resolved config (which includes the thread
    // count); the measured payload must still match exactly
    const auto doc1 = nlohmann::json::parse(read_file(dir1 / "summary.json"));
    const auto doc2 = nlohmann::json::parse(read_file(dir2 / "summary.json"));
    CHECK(doc1["cells"] == doc2["cells"]);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("cell isolation: a deleted output is reproduced exactly") {
    auto cfg = small_grid_config();
    const auto dir = fresh_dir("isolation");
    cfg.output_dir = dir.string();
    run_grid(cfg);
    const CellId cell{"c2", "dp_se", 3, 0.5};
    const std::string victim = trace_filename(cell, 1);
    const std::string original = read_file(dir / victim);
    fs::remove(dir / victim);

    // re-run only that (cell, run) through the library entry point
    const RunTrace trace = run_cell_once(cfg, cell, 1);
    write_file_atomic(dir / victim, trace_csv(trace_rows(cell, trace)));
    CHECK(read_file(dir / victim) == original);
    fs::remove_all(dir);
}

TEST_CASE("summary aggregation matches a recomputation from raw traces") {
    auto cfg = small_grid_config();
    const auto dir = fresh_dir("aggregation");
    cfg.output_dir = dir.string();
    const auto result = run_grid(cfg);

    const auto doc = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(doc["privacy"] == "event-level-dp");
    CHECK(doc["prng"] == "splitmix64");
    REQUIRE(doc["cells"].size() == result.cells.size());

    const auto rows = load_traces(dir.string());
    for (const auto& cell_doc : doc["cells"]) {
        const std::string algo = cell_doc["algorithm"];
        const auto times = cell_doc["checkpoints"].get<std::vector<uint64_t>>();
        const auto means = cell_doc["mean_regret"].get<std::vector<double>>();
        const auto pulls = cell_doc["mean_pulls"].get<std::vector<double>>();
        CHECK(std::accumulate(pulls.begin(), pulls.end(), 0.0) ==
              doctest::Approx(static_cast<double>(cfg.horizon)).epsilon(1e-12));
        const double elim_rate = cell_doc["optimal_eliminated_rate"];
        CHECK(elim_rate >= 0.0);
        CHECK(elim_rate <= 1.0);
        for (size_t i = 0; i < times.size(); ++i) {
            double sum = 0.0;
            int n = 0;
            for (const auto& row : rows) {
                if (row.algorithm == algo && row.t == times[i]) {
                    sum += row.cum_regret;
                    ++n;
                }
            }
            REQUIRE(n == 3);
            // raw traces round through %.10g; compare at matching precision
            CHECK(std::fabs(sum / n - means[i]) <=
                  1e-9 * std::max(1.0, std::fabs(means[i])) + 1e-7);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("aggregated means match in-memory traces to 1e-9") {
    auto cfg = small_grid_config();
    const auto result = run_grid(cfg);  // no output dir: in-memory only
    for (const auto& cell : result.cells) {
        double sum = 0.0;
        for (uint32_t r = 0; r < cfg.runs; ++r) {
            sum += run_cell_once(cfg, cell.cell, r).final_regret();
        }
        CHECK(std::fabs(sum / cfg.runs - cell.final_mean_regret()) <= 1e-9);
    }
}

TEST_CASE("zero-noise grids mark their outputs as non-private") {
    auto cfg = small_grid_config();
    cfg.zero_noise = true;
    cfg.runs = 1;
    const auto dir = fresh_dir("zeronoise");
    cfg.output_dir = dir.string();
    run_grid(cfg);
    const auto doc = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(doc["privacy"] == "zero-noise-debug");
    fs::remove_all(dir);
}

TEST_CASE("zero-noise deterministic grid reproduces the frozen fixture") {
    ExperimentConfig cfg;
    cfg.settings = {"c1"};
    cfg.algorithms = {"dp_se"};
    cfg.arm_counts = {3};
    cfg.epsilons = {0.5};
    cfg.horizon = 2000;
    cfg.runs = 1;
    cfg.checkpoint_count = 4;
    cfg.zero_noise = true;
    cfg.deterministic_env = true;
    const auto dir = fresh_dir("fixture");
    cfg.output_dir = dir.string();
    run_grid(cfg);

    const std::string expected =
        "setting,algorithm,K,epsilon,T,seed,t,cum_regret\n"
        "c1,dp_se,3,0.5,2000,18327191800493786302,500,16.65\n"
        "c1,dp_se,3,0.5,2000,18327191800493786302,1000,33.3\n"
        "c1,dp_se,3,0.5,2000,18327191800493786302,1500,50\n"
        "c1,dp_se,3,0.5,2000,18327191800493786302,2000,66.65\n";
    CHECK(read_file(dir / "trace_c1_dp_se_K3_eps0.5_run000.csv") == expected);
    fs::remove_all(dir);
}

TEST_CASE("compare: identity ratio, reciprocal symmetry, missing cells") {
    auto cfg = small_grid_config();
    const auto dir = fresh_dir("compare");
    cfg.output_dir = dir.string();
    run_grid(cfg);
    const auto rows = load_traces(dir.string());

    const auto self_report = compare_final_regret(rows, "dp_se", "dp_se");
    REQUIRE(self_report.size() == 1);
    CHECK(self_report[0].ratio == 1.0);
    CHECK(self_report[0].ratio_lo == 1.0);
    CHECK(self_report[0].ratio_hi == 1.0);

    const auto forward = compare_final_regret(rows, "se", "dp_se");
    const auto backward = compare_final_regret(rows, "dp_se", "se");
    REQUIRE(forward.size() == 1);
    REQUIRE(backward.size() == 1);
    CHECK(forward[0].ratio == doctest::Approx(1.0 / backward[0].ratio).epsilon(1e-12));
    CHECK(forward[0].ratio_lo == doctest::Approx(1.0 / backward[0].ratio_hi).epsilon(1e-12));
    CHECK(forward[0].ratio_hi == doctest::Approx(1.0 / backward[0].ratio_lo).epsilon(1e-12));
    CHECK(forward[0].ratio_lo <= forward[0].ratio_hi);

    CHECK_THROWS_AS(compare_final_regret(rows, "dp_se", "dp_ucb"), std::runtime_error);
    fs::remove_all(dir);
}

TEST_SUITE_END();
