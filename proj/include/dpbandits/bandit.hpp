#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dpbandits/env.hpp"
#include "dpbandits/noise.hpp"

namespace dpb {

/// Result of one bandit run: per-checkpoint cumulative pseudo-regret,
/// per-arm pull totals and (for elimination-style algorithms) the
/// elimination log.
struct RunTrace {
    struct Checkpoint {
        uint64_t t;
        double cum_regret;
    };
    struct Elimination {
        uint32_t arm;
        uint32_t epoch;
        uint64_t t;
    };

    std::string algorithm;
    uint32_t num_arms = 0;
    uint64_t horizon = 0;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    uint64_t seed = 0;
    std::vector<Checkpoint> checkpoints;
    std::vector<uint64_t> pulls;
    std::vector<Elimination> eliminations;

    double final_regret() const { return checkpoints.empty() ? 0.0 : checkpoints.back().cum_regret; }
    uint64_t total_pulls() const;
    bool was_eliminated(uint32_t arm) const;
};

/// Checkpoint schedule of `count` equally spaced times ending at the horizon.
std::vector<uint64_t> evenly_spaced_checkpoints(uint64_t horizon, uint32_t count);

/// Rounds per viable arm in epoch e of private successive elimination, with
/// delta_e = 2^-e:
///   ceil(max(32 ln(8 s e^2 / beta) / delta_e^2,
///            8 ln(4 s e^2 / beta) / (eps delta_e))) + 1.
uint64_t epoch_length(uint32_t viable_count, uint32_t epoch, double beta, double epsilon);

/// Non-private counterpart: Hoeffding branch only.
uint64_t epoch_length_nonprivate(uint32_t viable_count, uint32_t epoch, double beta);

/// Upper confidence index mean + sqrt(2 ln(t) / t_a); requires t >= t_a >= 1.
double ucb_index(double mean, uint64_t t, uint64_t arm_pulls);

/// One epoch of private successive elimination, after all viable arms have
/// been pulled `rounds` times and their empirical means computed.
struct EpochState {
    std::vector<uint32_t> viable;           // ascending arm indices
    uint32_t epoch = 1;                     // e >= 1
    double delta_e = 0.5;                   // 2^-e
    uint64_t rounds = 1;                    // R_e
    double h_e = 0.0;                       // sqrt(ln(8 s e^2 / beta) / (2 R_e))
    double c_e = 0.0;                       // ln(4 s e^2 / beta) / (R_e eps)
    double beta = 0.0;
    double epsilon = 0.0;
    std::vector<double> empirical_means;    // aligned with viable, zeroed at epoch start
};

/// Epoch state with delta_e, R_e, h_e, c_e computed from (viable, epoch, beta, eps).
EpochState make_epoch_state(std::vector<uint32_t> viable, uint32_t epoch, double beta,
                            double epsilon);

struct EliminationResult {
    std::vector<uint32_t> survivors;
    std::vector<double> noisy_means;        // aligned with the input viable set
};

/// Adds Lap(1/(eps R_e)) to each viable arm's empirical mean, one draw per
/// (epoch substream, arm), and removes every arm j with
/// noisy_max - noisy_j > 2 h_e + 2 c_e. The noisy argmax always survives.
EliminationResult eliminate(const EpochState& state, const NoiseSource& epoch_noise);

/// Per-epoch data-flow instrumentation for the privacy-structure checks.
struct DpSeProbe {
    struct EpochRecord {
        uint32_t epoch;
        std::vector<uint32_t> viable;
        uint64_t rounds;
        double delta_e;
        double h_e;
        double c_e;
        double laplace_scale;                // 1/(eps R_e); 0 when the epoch was truncated
        std::vector<uint64_t> samples_per_arm;  // aligned with viable
        bool completed;
    };
    std::vector<EpochRecord> epochs;
    uint64_t survivor_pulls = 0;
};

/// Private successive elimination: epochs of round-robin pulls over the viable
/// set, R_e rounds per arm, Laplace-noised elimination at each epoch end,
/// until one arm remains; that arm is pulled for the remaining horizon.
/// Pulls stop exactly at the horizon, mid-epoch if necessary, and no
/// elimination is attempted on a partial epoch.
RunTrace dp_se_run(const BanditEnvironment& env, double beta, double epsilon, uint64_t horizon,
                   NoiseSource root, const std::vector<uint64_t>& checkpoints = {},
                   DpSeProbe* probe = nullptr);

/// Non-private successive elimination reference.
RunTrace se_run(const BanditEnvironment& env, double beta, uint64_t horizon, NoiseSource root,
                const std::vector<uint64_t>& checkpoints = {});

/// Private UCB baseline: one prefix-sum tree counter per arm at budget eps
/// (parallel composition: each reward enters exactly one arm's counter).
/// Index = noisy mean + sqrt(2 ln t / t_a) + gamma with
///   gamma = (d/(eps t_a)) * d * ln(K t^4),  d = ceil(log2 horizon),
/// the high-probability envelope of the tree path noise at confidence
/// 1 - 1/(K t^4). gamma_enabled=false drops the inflation term (debug).
RunTrace dp_ucb_run(const BanditEnvironment& env, double epsilon, uint64_t horizon,
                    NoiseSource root, const std::vector<uint64_t>& checkpoints = {},
                    bool gamma_enabled = true);

/// Non-private UCB reference.
RunTrace ucb_run(const BanditEnvironment& env, uint64_t horizon, NoiseSource root,
                 const std::vector<uint64_t>& checkpoints = {});

}  // namespace dpb
