#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dpbandits/noise.hpp"

namespace dpb {

/// Pull-based sample source; each call yields the next stream value.
using SampleStream = std::function<double()>;

/// Stream that repeats a fixed value.
SampleStream constant_stream(double value);

/// Bernoulli(p) stream mapped to {-1, +1}; mean 2p - 1, support half-width 1.
SampleStream bernoulli_pm1_stream(double p, NoiseSource source);

/// Plain Bernoulli(p) stream on {0, 1}.
SampleStream bernoulli01_stream(double p, NoiseSource source);

struct StoppingRuleConfig {
    double support_halfwidth = 1.0;       // R: samples lie in [-R, R]
    double alpha = 0.5;                   // relative accuracy
    double beta = 0.05;                   // failure probability
    std::optional<double> epsilon;        // privacy budget; absent for the non-private rule
    uint64_t max_samples = 1'000'000;     // hard cap; a run never loops forever

    void validate(bool require_epsilon) const;
};

struct StoppingRuleOutcome {
    uint64_t halt_time = 0;               // samples consumed
    std::optional<double> estimate;       // released mean; absent when capped
    bool capped = false;                  // max_samples hit without halting
};

/// Noise scales of the private rules: sigma1 = sigma2 = 12R/eps, sigma3 = 4R/eps.
struct DpNasScales {
    double sigma1;
    double sigma2;
    double sigma3;

    static DpNasScales for_config(double support_halfwidth, double epsilon);
};

/// Optional instrumentation: timesteps at which the halting condition was evaluated.
struct StoppingRuleProbe {
    std::vector<uint64_t> query_times;
};

/// Non-private adaptive stopping rule: halts at the first t with
/// |mean_t| >= h_t * (1/alpha + 1), h_t = R*sqrt(ln(4t^2/beta)/(2t)),
/// and releases mean_t.
StoppingRuleOutcome nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg);

/// Private rule: sparse-vector threshold test each step plus a Laplace-noised
/// release. Halts at the first t with
///   |mean_t| >= h_t*(1 + 1/alpha) + (c_t + B + A_t)/t
/// where h_t = R*sqrt((2/t)*ln(16t^2/beta)),
///       c_t = sigma1*ln(4/beta) + sigma2*ln(8t^2/beta) + (sigma3/alpha)*ln(4/beta),
/// B ~ Lap(sigma1) once, A_t ~ Lap(sigma2) fresh per step, and releases
/// mean_t + L/t with L ~ Lap(sigma3) drawn after halting.
StoppingRuleOutcome dp_nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg,
                               NoiseSource noise, StoppingRuleProbe* probe = nullptr);

/// Doubling variant: the threshold test runs only at t = 2^k, with
/// c_t = sigma1*ln(4/beta) + sigma2*ln(8k^2/beta) + (sigma3/alpha)*ln(4/beta)
/// and h_t = R*sqrt((2/t)*ln(16k^2/beta)). Halting times are powers of 2
/// unless the run is capped.
StoppingRuleOutcome dp_exp_nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg,
                                   NoiseSource noise, StoppingRuleProbe* probe = nullptr);

/// High-probability halting-time envelope of the doubling rule:
///   t_U = ceil(2000 * (t0 + t1 + t2))
/// with t0 = R^2*ln((1/beta)*ln(R/(alpha|mu|)))/(alpha^2 mu^2),
///      t1 = R*ln((1/beta)*ln(R/(alpha|mu|)))/(eps |mu|),
///      t2 = R*ln(1/beta)/(eps alpha |mu|).
/// Requires mu != 0 and beta <= 0.08.
uint64_t expected_halt_bound(const StoppingRuleConfig& cfg, double mean);

}  // namespace dpb
