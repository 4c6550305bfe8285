#include "dpbandits/stopping.hpp"

#include <cmath>
#include <stdexcept>

namespace dpb {

namespace {

// Substream ids within one stopping-rule run. Keeping the threshold noise,
// the per-query noise and the release noise on separate substreams means a
// change in halting time never reshuffles unrelated draws.
constexpr uint64_t kThresholdStream = 1;  // B
constexpr uint64_t kQueryStream = 2;      // A_t sequence
constexpr uint64_t kReleaseStream = 3;    // L

double checked_sample(const SampleStream& stream, double support_halfwidth) {
    const double x = stream();
    if (!(std::fabs(x) <= support_halfwidth)) {
        throw std::runtime_error("stopping rule: sample outside [-R, R]");
    }
    return x;
}

}  // namespace

SampleStream constant_stream(double value) {
    return [value]() { return value; };
}

SampleStream bernoulli_pm1_stream(double p, NoiseSource source) {
    return [p, source]() mutable { return source.bernoulli(p) ? 1.0 : -1.0; };
}

SampleStream bernoulli01_stream(double p, NoiseSource source) {
    return [p, source]() mutable { return source.bernoulli(p) ? 1.0 : 0.0; };
}

void StoppingRuleConfig::validate(bool require_epsilon) const {
    if (!(support_halfwidth > 0.0)) {
        throw std::invalid_argument("stopping rule config: R must be > 0");
    }
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("stopping rule config: alpha must lie in (0,1]");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
        throw std::invalid_argument("stopping rule config: beta must lie in (0,1)");
    }
    if (max_samples < 1) {
        throw std::invalid_argument("stopping rule config: max_samples must be >= 1");
    }
    if (epsilon && !(*epsilon > 0.0)) {
        throw std::invalid_argument("stopping rule config: epsilon must be > 0");
    }
    if (require_epsilon && !epsilon) {
        throw std::invalid_argument("stopping rule config: epsilon required for private rules");
    }
}

DpNasScales DpNasScales::for_config(double support_halfwidth, double epsilon) {
    return DpNasScales{12.0 * support_halfwidth / epsilon, 12.0 * support_halfwidth / epsilon,
                       4.0 * support_halfwidth / epsilon};
}

StoppingRuleOutcome nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg) {
    cfg.validate(/*require_epsilon=*/false);
    const double R = cfg.support_halfwidth;
    double sum = 0.0;
    for (uint64_t t = 1; t <= cfg.max_samples; ++t) {
        sum += checked_sample(stream, R);
        const double mean = sum / static_cast<double>(t);
        const double td = static_cast<double>(t);
        const double h = R * std::sqrt(std::log(4.0 * td * td / cfg.beta) / (2.0 * td));
        if (std::fabs(mean) >= h * (1.0 / cfg.alpha + 1.0)) {
            return StoppingRuleOutcome{t, mean, false};
        }
    }
    return StoppingRuleOutcome{cfg.max_samples, std::nullopt, true};
}

StoppingRuleOutcome dp_nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg,
                               NoiseSource noise, StoppingRuleProbe* probe) {
    cfg.validate(/*require_epsilon=*/true);
    const double R = cfg.support_halfwidth;
    const DpNasScales s = DpNasScales::for_config(R, *cfg.epsilon);
    const double log4b = std::log(4.0 / cfg.beta);

    NoiseSource query_noise = noise.substream(kQueryStream);
    const double threshold_noise = noise.substream(kThresholdStream).laplace(s.sigma1);

    double sum = 0.0;
    for (uint64_t t = 1; t <= cfg.max_samples; ++t) {
        const double query_step_noise = query_noise.laplace(s.sigma2);
        sum += checked_sample(stream, R);
        const double td = static_cast<double>(t);
        const double mean = sum / td;
        const double h = R * std::sqrt((2.0 / td) * std::log(16.0 * td * td / cfg.beta));
        const double c = s.sigma1 * log4b + s.sigma2 * std::log(8.0 * td * td / cfg.beta) +
                         (s.sigma3 / cfg.alpha) * log4b;
        if (probe) {
            probe->query_times.push_back(t);
        }
        if (std::fabs(mean) >= h * (1.0 + 1.0 / cfg.alpha) +
                                   (c + threshold_noise + query_step_noise) / td) {
            const double release_noise = noise.substream(kReleaseStream).laplace(s.sigma3);
            return StoppingRuleOutcome{t, mean + release_noise / td, false};
        }
    }
    return StoppingRuleOutcome{cfg.max_samples, std::nullopt, true};
}

StoppingRuleOutcome dp_exp_nas_run(const SampleStream& stream, const StoppingRuleConfig& cfg,
                                   NoiseSource noise, StoppingRuleProbe* probe) {
    cfg.validate(/*require_epsilon=*/true);
    const double R = cfg.support_halfwidth;
    const DpNasScales s = DpNasScales::for_config(R, *cfg.epsilon);
    const double log4b = std::log(4.0 / cfg.beta);

    NoiseSource query_noise = noise.substream(kQueryStream);
    const double threshold_noise = noise.substream(kThresholdStream).laplace(s.sigma1);

    double sum = 0.0;
    uint64_t t = 0;
    for (uint64_t k = 1; k < 63; ++k) {
        const uint64_t target = uint64_t{1} << k;
        while (t < target && t < cfg.max_samples) {
            sum += checked_sample(stream, R);
            ++t;
        }
        if (t < target) {
            break;  // cap reached before the next query point
        }
        const double query_step_noise = query_noise.laplace(s.sigma2);
        const double td = static_cast<double>(t);
        const double kd = static_cast<double>(k);
        const double mean = sum / td;
        const double h = R * std::sqrt((2.0 / td) * std::log(16.0 * kd * kd / cfg.beta));
        const double c = s.sigma1 * log4b + s.sigma2 * std::log(8.0 * kd * kd / cfg.beta) +
                         (s.sigma3 / cfg.alpha) * log4b;
        if (probe) {
            probe->query_times.push_back(t);
        }
        if (std::fabs(mean) >= h * (1.0 + 1.0 / cfg.alpha) +
                                   (c + threshold_noise + query_step_noise) / td) {
            const double release_noise = noise.substream(kReleaseStream).laplace(s.sigma3);
            return StoppingRuleOutcome{t, mean + release_noise / td, false};
        }
        if (t >= cfg.max_samples) {
            break;
        }
    }
    // Consume the remaining budget below the next query point, then report the cap.
    while (t < cfg.max_samples) {
        sum += checked_sample(stream, R);
        ++t;
    }
    return StoppingRuleOutcome{cfg.max_samples, std::nullopt, true};
}

uint64_t expected_halt_bound(const StoppingRuleConfig& cfg, double mean) {
    cfg.validate(/*require_epsilon=*/true);
    if (mean == 0.0) {
        throw std::domain_error("expected_halt_bound: mean must be nonzero");
    }
    if (!(cfg.beta <= 0.08)) {
        throw std::domain_error("expected_halt_bound: requires beta <= 0.08");
    }
    const double R = cfg.support_halfwidth;
    const double am = cfg.alpha * std::fabs(mean);
    const double inner = std::log(R / am);
    if (!(inner > 0.0) || !((1.0 / cfg.beta) * inner > 1.0)) {
        throw std::domain_error("expected_halt_bound: alpha*|mean| too close to R");
    }
    const double loglog = std::log(inner / cfg.beta);
    const double t0 = R * R * loglog / (cfg.alpha * cfg.alpha * mean * mean);
    const double t1 = R * loglog / (*cfg.epsilon * std::fabs(mean));
    const double t2 = R * std::log(1.0 / cfg.beta) / (*cfg.epsilon * am);
    return static_cast<uint64_t>(std::ceil(2000.0 * (t0 + t1 + t2)));
}

}  // namespace dpb
