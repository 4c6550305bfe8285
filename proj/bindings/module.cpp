#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpbandits/bandit.hpp"
#include "dpbandits/env.hpp"
#include "dpbandits/harness.hpp"
#include "dpbandits/noise.hpp"
#include "dpbandits/stopping.hpp"
#include "dpbandits/tree.hpp"

namespace py = pybind11;
using namespace dpb;

PYBIND11_MODULE(_dpbandits, m) {
    m.doc() = "Differentially private stopping rules and multi-armed bandit algorithms";

    py::class_<LaplaceScale>(m, "LaplaceScale")
        .def(py::init<double>(), py::arg("value"))
        .def_property_readonly("value", &LaplaceScale::value);

    py::class_<NoiseSource>(m, "NoiseSource")
        .def(py::init<uint64_t, uint64_t, bool>(), py::arg("seed"), py::arg("stream_id") = 0,
             py::arg("zero_noise") = false)
        .def("next_u64", &NoiseSource::next_u64)
        .def("uniform01", &NoiseSource::uniform01)
        .def("bernoulli", &NoiseSource::bernoulli, py::arg("p"))
        .def("laplace", py::overload_cast<double>(&NoiseSource::laplace), py::arg("scale"))
        .def("substream", &NoiseSource::substream, py::arg("id"))
        .def_property_readonly("zero_noise", &NoiseSource::zero_noise)
        .def_property_readonly_static(
            "generator_name", [](py::object) { return NoiseSource::kGeneratorName; });

    m.def("laplace_inverse_cdf",
          [](double u, double scale) { return laplace_inverse_cdf(u, LaplaceScale(scale)); },
          py::arg("u"), py::arg("scale"));
    m.def("laplace_tail",
          [](double tau, double scale) { return laplace_tail(tau, LaplaceScale(scale)); },
          py::arg("tau"), py::arg("scale"));
    m.def("hoeffding_radius", &hoeffding_radius, py::arg("t"), py::arg("support_halfwidth"),
          py::arg("delta"));
    m.def("fact1_lhs", &fact1_lhs, py::arg("a"), py::arg("x"));

    py::class_<StoppingRuleConfig>(m, "StoppingRuleConfig")
        .def(py::init([](double support_halfwidth, double alpha, double beta,
                         std::optional<double> epsilon, uint64_t max_samples) {
                 StoppingRuleConfig cfg;
                 cfg.support_halfwidth = support_halfwidth;
                 cfg.alpha = alpha;
                 cfg.beta = beta;
                 cfg.epsilon = epsilon;
                 cfg.max_samples = max_samples;
                 return cfg;
             }),
             py::arg("support_halfwidth") = 1.0, py::arg("alpha") = 0.5, py::arg("beta") = 0.05,
             py::arg("epsilon") = std::nullopt, py::arg("max_samples") = 1'000'000)
        .def_readwrite("support_halfwidth", &StoppingRuleConfig::support_halfwidth)
        .def_readwrite("alpha", &StoppingRuleConfig::alpha)
        .def_readwrite("beta", &StoppingRuleConfig::beta)
        .def_readwrite("epsilon", &StoppingRuleConfig::epsilon)
        .def_readwrite("max_samples", &StoppingRuleConfig::max_samples);

    py::class_<StoppingRuleOutcome>(m, "StoppingRuleOutcome")
        .def_readonly("halt_time", &StoppingRuleOutcome::halt_time)
        .def_readonly("estimate", &StoppingRuleOutcome::estimate)
        .def_readonly("capped", &StoppingRuleOutcome::capped)
        .def("__repr__", [](const StoppingRuleOutcome& o) {
            if (o.capped) {
                return "StoppingRuleOutcome(capped at " + std::to_string(o.halt_time) + ")";
            }
            return "StoppingRuleOutcome(halt_time=" + std::to_string(o.halt_time) +
                   ", estimate=" + std::to_string(*o.estimate) + ")";
        });

    m.def("constant_stream", &constant_stream, py::arg("value"));
    m.def("bernoulli_pm1_stream", &bernoulli_pm1_stream, py::arg("p"), py::arg("source"));
    m.def("bernoulli01_stream", &bernoulli01_stream, py::arg("p"), py::arg("source"));

    m.def("nas_run", &nas_run, py::arg("stream"), py::arg("config"));
    m.def("dp_nas_run",
          [](const SampleStream& stream, const StoppingRuleConfig& cfg, NoiseSource noise) {
              return dp_nas_run(stream, cfg, noise);
          },
          py::arg("stream"), py::arg("config"), py::arg("noise"));
    m.def("dp_exp_nas_run",
          [](const SampleStream& stream, const StoppingRuleConfig& cfg, NoiseSource noise) {
              return dp_exp_nas_run(stream, cfg, noise);
          },
          py::arg("stream"), py::arg("config"), py::arg("noise"));
    m.def("expected_halt_bound", &expected_halt_bound, py::arg("config"), py::arg("mean"));

    py::class_<TreeCounter>(m, "TreeCounter")
        .def(py::init<uint64_t, double, NoiseSource>(), py::arg("horizon"), py::arg("epsilon"),
             py::arg("noise"))
        .def("add", &TreeCounter::add, py::arg("value"))
        .def("sum", &TreeCounter::sum)
        .def_property_readonly("count", &TreeCounter::count)
        .def_property_readonly("raw_sum", &TreeCounter::raw_sum)
        .def_property_readonly("depth", &TreeCounter::depth)
        .def_property_readonly("node_scale", &TreeCounter::node_scale)
        .def("covering_nodes", &TreeCounter::covering_nodes, py::arg("t"))
        .def("touching_nodes", &TreeCounter::touching_nodes, py::arg("element"));

    m.def("means_c1", &means_c1, py::arg("num_arms"));
    m.def("means_c2", &means_c2, py::arg("num_arms"));
    m.def("means_c3", &means_c3, py::arg("num_arms"));
    m.def("means_c4", &means_c4, py::arg("num_arms"));
    m.def("means_for_setting", &means_for_setting, py::arg("setting"), py::arg("num_arms"));

    py::class_<BanditEnvironment>(m, "BanditEnvironment")
        .def(py::init<std::vector<double>, bool>(), py::arg("means"),
             py::arg("deterministic") = false)
        .def_property_readonly("num_arms", &BanditEnvironment::num_arms)
        .def_property_readonly("means", &BanditEnvironment::means)
        .def_property_readonly("optimal_arm", &BanditEnvironment::optimal_arm)
        .def("gap", &BanditEnvironment::gap, py::arg("arm"))
        .def("pull", &BanditEnvironment::pull, py::arg("arm"), py::arg("rewards"))
        .def("regret_increment", &BanditEnvironment::regret_increment, py::arg("arm"));

    py::class_<RunTrace::Checkpoint>(m, "Checkpoint")
        .def_readonly("t", &RunTrace::Checkpoint::t)
        .def_readonly("cum_regret", &RunTrace::Checkpoint::cum_regret);

    py::class_<RunTrace::Elimination>(m, "Elimination")
        .def_readonly("arm", &RunTrace::Elimination::arm)
        .def_readonly("epoch", &RunTrace::Elimination::epoch)
        .def_readonly("t", &RunTrace::Elimination::t);

    py::class_<RunTrace>(m, "RunTrace")
        .def_readonly("algorithm", &RunTrace::algorithm)
        .def_readonly("num_arms", &RunTrace::num_arms)
        .def_readonly("horizon", &RunTrace::horizon)
        .def_readonly("epsilon", &RunTrace::epsilon)
        .def_readonly("beta", &RunTrace::beta)
        .def_readonly("seed", &RunTrace::seed)
        .def_readonly("checkpoints", &RunTrace::checkpoints)
        .def_readonly("pulls", &RunTrace::pulls)
        .def_readonly("eliminations", &RunTrace::eliminations)
        .def_property_readonly("final_regret", &RunTrace::final_regret)
        .def_property_readonly("total_pulls", &RunTrace::total_pulls);

    m.def("evenly_spaced_checkpoints", &evenly_spaced_checkpoints, py::arg("horizon"),
          py::arg("count"));
    m.def("epoch_length", &epoch_length, py::arg("viable_count"), py::arg("epoch"),
          py::arg("beta"), py::arg("epsilon"));
    m.def("epoch_length_nonprivate", &epoch_length_nonprivate, py::arg("viable_count"),
          py::arg("epoch"), py::arg("beta"));
    m.def("ucb_index", &ucb_index, py::arg("mean"), py::arg("t"), py::arg("arm_pulls"));

    m.def("dp_se_run",
          [](const BanditEnvironment& env, double beta, double epsilon, uint64_t horizon,
             NoiseSource root, const std::vector<uint64_t>& checkpoints) {
              return dp_se_run(env, beta, epsilon, horizon, root, checkpoints);
          },
          py::arg("env"), py::arg("beta"), py::arg("epsilon"), py::arg("horizon"),
          py::arg("root"), py::arg("checkpoints") = std::vector<uint64_t>{});
    m.def("se_run",
          [](const BanditEnvironment& env, double beta, uint64_t horizon, NoiseSource root,
             const std::vector<uint64_t>& checkpoints) {
              return se_run(env, beta, horizon, root, checkpoints);
          },
          py::arg("env"), py::arg("beta"), py::arg("horizon"), py::arg("root"),
          py::arg("checkpoints") = std::vector<uint64_t>{});
    m.def("dp_ucb_run",
          [](const BanditEnvironment& env, double epsilon, uint64_t horizon, NoiseSource root,
             const std::vector<uint64_t>& checkpoints, bool gamma_enabled) {
              return dp_ucb_run(env, epsilon, horizon, root, checkpoints, gamma_enabled);
          },
          py::arg("env"), py::arg("epsilon"), py::arg("horizon"), py::arg("root"),
          py::arg("checkpoints") = std::vector<uint64_t>{}, py::arg("gamma_enabled") = true);
    m.def("ucb_run",
          [](const BanditEnvironment& env, uint64_t horizon, NoiseSource root,
             const std::vector<uint64_t>& checkpoints) {
              return ucb_run(env, horizon, root, checkpoints);
          },
          py::arg("env"), py::arg("horizon"), py::arg("root"),
          py::arg("checkpoints") = std::vector<uint64_t>{});

    py::class_<CellId>(m, "CellId")
        .def(py::init([](std::string setting, std::string algorithm, uint32_t num_arms,
                         double epsilon) {
                 return CellId{std::move(setting), std::move(algorithm), num_arms, epsilon};
             }),
             py::arg("setting"), py::arg("algorithm"), py::arg("num_arms"), py::arg("epsilon"))
        .def_readonly("setting", &CellId::setting)
        .def_readonly("algorithm", &CellId::algorithm)
        .def_readonly("num_arms", &CellId::num_arms)
        .def_readonly("epsilon", &CellId::epsilon);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("settings", &ExperimentConfig::settings)
        .def_readwrite("algorithms", &ExperimentConfig::algorithms)
        .def_readwrite("arm_counts", &ExperimentConfig::arm_counts)
        .def_readwrite("epsilons", &ExperimentConfig::epsilons)
        .def_readwrite("horizon", &ExperimentConfig::horizon)
        .def_readwrite("runs", &ExperimentConfig::runs)
        .def_readwrite("base_seed", &ExperimentConfig::base_seed)
        .def_readwrite("checkpoint_count", &ExperimentConfig::checkpoint_count)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("zero_noise", &ExperimentConfig::zero_noise)
        .def_readwrite("deterministic_env", &ExperimentConfig::deterministic_env)
        .def_readwrite("beta", &ExperimentConfig::beta)
        .def("resolved_text", &ExperimentConfig::resolved_text);

    py::class_<CellSummary>(m, "CellSummary")
        .def_readonly("cell", &CellSummary::cell)
        .def_readonly("horizon", &CellSummary::horizon)
        .def_readonly("runs", &CellSummary::runs)
        .def_readonly("checkpoint_times", &CellSummary::checkpoint_times)
        .def_readonly("mean_regret", &CellSummary::mean_regret)
        .def_readonly("stderr_regret", &CellSummary::stderr_regret)
        .def_readonly("mean_pulls", &CellSummary::mean_pulls)
        .def_readonly("optimal_eliminated_rate", &CellSummary::optimal_eliminated_rate)
        .def_property_readonly("final_mean_regret", &CellSummary::final_mean_regret);

    py::class_<GridResult>(m, "GridResult")
        .def_readonly("cells", &GridResult::cells)
        .def_readonly("trace_files", &GridResult::trace_files);

    m.def("cell_seed", &cell_seed, py::arg("base_seed"), py::arg("cell"), py::arg("run_index"));
    m.def("run_cell_once", &run_cell_once, py::arg("config"), py::arg("cell"),
          py::arg("run_index"));
    m.def("run_grid", &run_grid, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
