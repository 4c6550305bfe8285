#include "dpbandits/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpbandits/tree.hpp"

namespace dpb {

namespace {

// Substream layout inside one bandit run. Rewards use one substream per arm
// so paired-seed comparisons across algorithms see identical reward tapes
// wherever pull sequences coincide.
constexpr uint64_t kRewardStream = 1;
constexpr uint64_t kEliminationStream = 2;
constexpr uint64_t kTreeStream = 3;

std::vector<NoiseSource> per_arm_reward_streams(const NoiseSource& root, uint32_t num_arms) {
    NoiseSource reward_root = root.substream(kRewardStream);
    std::vector<NoiseSource> streams;
    streams.reserve(num_arms);
    for (uint32_t a = 0; a < num_arms; ++a) {
        streams.push_back(reward_root.substream(a));
    }
    return streams;
}

std::vector<uint64_t> normalized_checkpoints(std::vector<uint64_t> times, uint64_t horizon) {
    std::erase_if(times, [horizon](uint64_t t) { return t == 0 || t > horizon; });
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty() || times.back() != horizon) {
        times.push_back(horizon);
    }
    return times;
}

// Accumulates pseudo-regret per pull and snapshots it at checkpoint times.
class RegretRecorder {
public:
    RegretRecorder(const BanditEnvironment& env, RunTrace& trace, std::vector<uint64_t> checkpoints)
        : env_(env), trace_(trace), checkpoints_(std::move(checkpoints)) {}

    void record_pull(uint32_t arm) {
        ++t_;
        cum_ += env_.regret_increment(arm);
        ++trace_.pulls[arm];
        while (next_ < checkpoints_.size() && checkpoints_[next_] == t_) {
            trace_.checkpoints.push_back({t_, cum_});
            ++next_;
        }
    }

    uint64_t time() const noexcept { return t_; }

private:
    const BanditEnvironment& env_;
    RunTrace& trace_;
    std::vector<uint64_t> checkpoints_;
    size_t next_ = 0;
    uint64_t t_ = 0;
    double cum_ = 0.0;
};

RunTrace init_trace(const char* algorithm, const BanditEnvironment& env, uint64_t horizon,
                    double epsilon, double beta, const NoiseSource& root) {
    RunTrace trace;
    trace.algorithm = algorithm;
    trace.num_arms = env.num_arms();
    trace.horizon = horizon;
    trace.epsilon = epsilon;
    trace.beta = beta;
    trace.seed = root.seed();
    trace.pulls.assign(env.num_arms(), 0);
    return trace;
}

void validate_run(const BanditEnvironment& env, uint64_t horizon) {
    if (env.num_arms() < 2) {
        throw std::invalid_argument("bandit run: need at least 2 arms");
    }
    if (horizon < env.num_arms()) {
        throw std::invalid_argument("bandit run: horizon must be >= number of arms");
    }
}

double epoch_rounds_real(uint32_t viable_count, uint32_t epoch, double beta, double epsilon,
                         bool private_branch) {
    if (viable_count < 1 || epoch < 1) {
        throw std::domain_error("epoch_length: viable count and epoch must be >= 1");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
        throw std::domain_error("epoch_length: beta must lie in (0,1)");
    }
    const double delta = std::exp2(-static_cast<double>(epoch));
    const double se2 = static_cast<double>(viable_count) * static_cast<double>(epoch) *
                       static_cast<double>(epoch);
    double rounds = 32.0 * std::log(8.0 * se2 / beta) / (delta * delta);
    if (private_branch) {
        if (!(epsilon > 0.0)) {
            throw std::domain_error("epoch_length: epsilon must be > 0");
        }
        rounds = std::max(rounds, 8.0 * std::log(4.0 * se2 / beta) / (epsilon * delta));
    }
    // ceil(...) + 1 pulls materializes the "while r < R_e" loop exactly.
    const double capped = std::min(std::ceil(rounds) + 1.0, 0x1.0p62);
    return capped;
}

// Generic successive-elimination loop shared by the private and non-private
// variants; `Eliminate` maps a finished EpochState to its survivor set.
template <typename MakeEpoch, typename Eliminate>
RunTrace se_loop(const BanditEnvironment& env, uint64_t horizon, RunTrace trace,
                 const NoiseSource& root, const std::vector<uint64_t>& checkpoints,
                 MakeEpoch make_epoch, Eliminate run_elimination, DpSeProbe* probe) {
    const uint32_t num_arms = env.num_arms();
    auto rewards = per_arm_reward_streams(root, num_arms);
    RegretRecorder recorder(env, trace, normalized_checkpoints(checkpoints, horizon));

    std::vector<uint32_t> viable(num_arms);
    std::iota(viable.begin(), viable.end(), 0);

    for (uint32_t epoch = 1; viable.size() > 1 && recorder.time() < horizon; ++epoch) {
        EpochState state = make_epoch(viable, epoch);
        std::vector<uint64_t> samples(viable.size(), 0);
        bool completed = true;
        for (uint64_t r = 0; r < state.rounds && completed; ++r) {
            for (size_t i = 0; i < viable.size(); ++i) {
                if (recorder.time() >= horizon) {
                    completed = false;
                    break;
                }
                const uint32_t arm = viable[i];
                state.empirical_means[i] += env.pull(arm, rewards[arm]);
                ++samples[i];
                recorder.record_pull(arm);
            }
        }
        if (completed) {
            for (double& m : state.empirical_means) {
                m /= static_cast<double>(state.rounds);
            }
        }
        if (probe) {
            probe->epochs.push_back({epoch, viable, state.rounds, state.delta_e, state.h_e,
                                     state.c_e,
                                     completed && state.epsilon > 0.0
                                         ? 1.0 / (state.epsilon * static_cast<double>(state.rounds))
                                         : 0.0,
                                     samples, completed});
        }
        if (!completed) {
            return trace;  // horizon exhausted mid-epoch: no elimination on partial data
        }
        const std::vector<uint32_t> survivors = run_elimination(state);
        for (uint32_t arm : viable) {
            if (std::find(survivors.begin(), survivors.end(), arm) == survivors.end()) {
                trace.eliminations.push_back({arm, epoch, recorder.time()});
            }
        }
        viable = survivors;
    }

    const uint32_t last = viable.front();
    while (recorder.time() < horizon) {
        (void)env.pull(last, rewards[last]);
        recorder.record_pull(last);
        if (probe) {
            ++probe->survivor_pulls;
        }
    }
    return trace;
}

// Cached per-arm state of a UCB-style loop; `noisy` is the release the index
// is computed from (tree-mechanism output for the private variant).
struct UcbArmState {
    uint64_t pulls = 0;
    double noisy_sum = 0.0;
};

template <typename OnReward, typename Bonus>
RunTrace ucb_loop(const BanditEnvironment& env, uint64_t horizon, RunTrace trace,
                  const NoiseSource& root, const std::vector<uint64_t>& checkpoints,
                  OnReward on_reward, Bonus bonus) {
    const uint32_t num_arms = env.num_arms();
    auto rewards = per_arm_reward_streams(root, num_arms);
    RegretRecorder recorder(env, trace, normalized_checkpoints(checkpoints, horizon));
    std::vector<UcbArmState> arms(num_arms);

    // Initialization round: each arm once, in index order.
    for (uint32_t a = 0; a < num_arms && recorder.time() < horizon; ++a) {
        arms[a].noisy_sum = on_reward(a, env.pull(a, rewards[a]));
        arms[a].pulls = 1;
        recorder.record_pull(a);
    }
    while (recorder.time() < horizon) {
        const uint64_t t = recorder.time() + 1;
        uint32_t best = 0;
        double best_index = -std::numeric_limits<double>::infinity();
        for (uint32_t a = 0; a < num_arms; ++a) {
            const double mean = arms[a].noisy_sum / static_cast<double>(arms[a].pulls);
            const double index = ucb_index(mean, t, arms[a].pulls) + bonus(t, arms[a].pulls);
            if (index > best_index) {  // ties go to the lowest arm index
                best_index = index;
                best = a;
            }
        }
        arms[best].noisy_sum = on_reward(best, env.pull(best, rewards[best]));
        ++arms[best].pulls;
        recorder.record_pull(best);
    }
    return trace;
}

}  // namespace

uint64_t RunTrace::total_pulls() const {
    return std::accumulate(pulls.begin(), pulls.end(), uint64_t{0});
}

bool RunTrace::was_eliminated(uint32_t arm) const {
    return std::any_of(eliminations.begin(), eliminations.end(),
                       [arm](const Elimination& e) { return e.arm == arm; });
}

std::vector<uint64_t> evenly_spaced_checkpoints(uint64_t horizon, uint32_t count) {
    if (count < 1) {
        throw std::invalid_argument("checkpoints: count must be >= 1");
    }
    std::vector<uint64_t> times;
    times.reserve(count);
    for (uint32_t i = 1; i <= count; ++i) {
        const auto t = static_cast<uint64_t>(
            std::llround(static_cast<double>(horizon) * static_cast<double>(i) / count));
        times.push_back(std::max<uint64_t>(1, t));
    }
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

uint64_t epoch_length(uint32_t viable_count, uint32_t epoch, double beta, double epsilon) {
    return static_cast<uint64_t>(epoch_rounds_real(viable_count, epoch, beta, epsilon, true));
}

uint64_t epoch_length_nonprivate(uint32_t viable_count, uint32_t epoch, double beta) {
    return static_cast<uint64_t>(epoch_rounds_real(viable_count, epoch, beta, 0.0, false));
}

double ucb_index(double mean, uint64_t t, uint64_t arm_pulls) {
    if (arm_pulls < 1 || t < arm_pulls) {
        throw std::domain_error("ucb_index: requires t >= arm_pulls >= 1");
    }
    return mean + std::sqrt(2.0 * std::log(static_cast<double>(t)) /
                            static_cast<double>(arm_pulls));
}

EpochState make_epoch_state(std::vector<uint32_t> viable, uint32_t epoch, double beta,
                            double epsilon) {
    EpochState state;
    state.rounds = epoch_length(static_cast<uint32_t>(viable.size()), epoch, beta, epsilon);
    state.epoch = epoch;
    state.delta_e = std::exp2(-static_cast<double>(epoch));
    state.beta = beta;
    state.epsilon = epsilon;
    const double se2 = static_cast<double>(viable.size()) * static_cast<double>(epoch) *
                       static_cast<double>(epoch);
    const double rounds = static_cast<double>(state.rounds);
    state.h_e = std::sqrt(std::log(8.0 * se2 / beta) / (2.0 * rounds));
    state.c_e = std::log(4.0 * se2 / beta) / (rounds * epsilon);
    state.empirical_means.assign(viable.size(), 0.0);
    state.viable = std::move(viable);
    return state;
}

EliminationResult eliminate(const EpochState& state, const NoiseSource& epoch_noise) {
    EliminationResult result;
    result.noisy_means.resize(state.viable.size());
    const double scale = 1.0 / (state.epsilon * static_cast<double>(state.rounds));
    for (size_t i = 0; i < state.viable.size(); ++i) {
        result.noisy_means[i] =
            state.empirical_means[i] + epoch_noise.substream(state.viable[i]).laplace(scale);
    }
    const double noisy_max = *std::max_element(result.noisy_means.begin(), result.noisy_means.end());
    const double threshold = 2.0 * state.h_e + 2.0 * state.c_e;
    for (size_t i = 0; i < state.viable.size(); ++i) {
        if (!(noisy_max - result.noisy_means[i] > threshold)) {
            result.survivors.push_back(state.viable[i]);
        }
    }
    return result;
}

RunTrace dp_se_run(const BanditEnvironment& env, double beta, double epsilon, uint64_t horizon,
                   NoiseSource root, const std::vector<uint64_t>& checkpoints, DpSeProbe* probe) {
    validate_run(env, horizon);
    NoiseSource elimination_root = root.substream(kEliminationStream);
    RunTrace trace = init_trace("dp_se", env, horizon, epsilon, beta, root);
    return se_loop(
        env, horizon, std::move(trace), root, checkpoints,
        [&](const std::vector<uint32_t>& viable, uint32_t epoch) {
            return make_epoch_state(viable, epoch, beta, epsilon);
        },
        [&](const EpochState& state) {
            NoiseSource epoch_noise = elimination_root.substream(state.epoch);
            return eliminate(state, epoch_noise).survivors;
        },
        probe);
}

RunTrace se_run(const BanditEnvironment& env, double beta, uint64_t horizon, NoiseSource root,
                const std::vector<uint64_t>& checkpoints) {
    validate_run(env, horizon);
    RunTrace trace = init_trace("se", env, horizon,
                                std::numeric_limits<double>::quiet_NaN(), beta, root);
    return se_loop(
        env, horizon, std::move(trace), root, checkpoints,
        [&](const std::vector<uint32_t>& viable, uint32_t epoch) {
            EpochState state;
            state.rounds = epoch_length_nonprivate(static_cast<uint32_t>(viable.size()), epoch,
                                                   beta);
            state.epoch = epoch;
            state.delta_e = std::exp2(-static_cast<double>(epoch));
            state.beta = beta;
            const double se2 = static_cast<double>(viable.size()) *
                               static_cast<double>(epoch) * static_cast<double>(epoch);
            state.h_e = std::sqrt(std::log(8.0 * se2 / beta) /
                                  (2.0 * static_cast<double>(state.rounds)));
            state.c_e = 0.0;
            state.empirical_means.assign(viable.size(), 0.0);
            state.viable = viable;
            return state;
        },
        [&](const EpochState& state) {
            const double max_mean =
                *std::max_element(state.empirical_means.begin(), state.empirical_means.end());
            std::vector<uint32_t> survivors;
            for (size_t i = 0; i < state.viable.size(); ++i) {
                if (!(max_mean - state.empirical_means[i] > 2.0 * state.h_e)) {
                    survivors.push_back(state.viable[i]);
                }
            }
            return survivors;
        },
        static_cast<DpSeProbe*>(nullptr));
}

RunTrace dp_ucb_run(const BanditEnvironment& env, double epsilon, uint64_t horizon,
                    NoiseSource root, const std::vector<uint64_t>& checkpoints,
                    bool gamma_enabled) {
    validate_run(env, horizon);
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("dp_ucb_run: epsilon must be > 0");
    }
    RunTrace trace = init_trace("dp_ucb", env, horizon, epsilon,
                                std::numeric_limits<double>::quiet_NaN(), root);
    NoiseSource tree_root = root.substream(kTreeStream);
    std::vector<TreeCounter> counters;
    counters.reserve(env.num_arms());
    for (uint32_t a = 0; a < env.num_arms(); ++a) {
        counters.emplace_back(horizon, epsilon, tree_root.substream(a));
    }
    uint64_t depth = 0;
    for (uint64_t p = 1; p < horizon; p <<= 1) {
        ++depth;
    }
    const double d = static_cast<double>(std::max<uint64_t>(1, depth));
    const double log_arms = std::log(static_cast<double>(env.num_arms()));
    return ucb_loop(
        env, horizon, std::move(trace), root, checkpoints,
        [&counters](uint32_t arm, double reward) {
            counters[arm].add(reward);
            return counters[arm].sum();
        },
        [&, gamma_enabled](uint64_t t, uint64_t arm_pulls) {
            if (!gamma_enabled) {
                return 0.0;
            }
            const double log_kt4 = log_arms + 4.0 * std::log(static_cast<double>(t));
            return d * d * log_kt4 / (epsilon * static_cast<double>(arm_pulls));
        });
}

RunTrace ucb_run(const BanditEnvironment& env, uint64_t horizon, NoiseSource root,
                 const std::vector<uint64_t>& checkpoints) {
    validate_run(env, horizon);
    RunTrace trace = init_trace("ucb", env, horizon,
                                std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN(), root);
    std::vector<double> sums(env.num_arms(), 0.0);
    return ucb_loop(
        env, horizon, std::move(trace), root, checkpoints,
        [&sums](uint32_t arm, double reward) {
            sums[arm] += reward;
            return sums[arm];
        },
        [](uint64_t, uint64_t) { return 0.0; });
}

}  // namespace dpb
