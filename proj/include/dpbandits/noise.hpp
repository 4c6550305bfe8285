#pragma once

#include <cstdint>
#include <stdexcept>

namespace dpb {

/// Positive scale parameter of a Laplace distribution (the lambda of Lap(lambda)).
class LaplaceScale {
public:
    explicit LaplaceScale(double value) : value_(value) {
        if (!(value > 0.0)) {
            throw std::domain_error("LaplaceScale: scale must be > 0");
        }
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Inverse CDF of the zero-centered Laplace distribution:
///   -lambda * sign(u - 1/2) * ln(1 - 2|u - 1/2|),  u in (0,1).
/// Monotone in u, median 0.
double laplace_inverse_cdf(double u, LaplaceScale scale);

/// Two-sided tail mass Pr[|X| > tau] = exp(-tau/lambda) for X ~ Lap(lambda).
double laplace_tail(double tau, LaplaceScale scale);

/// Hoeffding confidence radius for t i.i.d. samples supported on an interval
/// of half-width R: returns R * sqrt(ln(2/delta) / (2t)), the radius h with
/// Pr[|mean_t - mu| >= h] <= delta.
double hoeffding_radius(uint64_t t, double support_halfwidth, double delta);

/// ln(a * ln(x)) / x for a > 1, x > e. Used by the property suite to check
/// both crossing directions of the log-log threshold on a grid.
double fact1_lhs(double a, double x);

/// Splittable counter-based PRNG (SplitMix64 output function; Steele, Lea &
/// Flood 2014). A source is fully determined by (seed, stream_id): identical
/// pairs replay identical draw sequences, and substreams derived via
/// substream(id) are statistically independent per the split construction.
///
/// A zero-noise source returns 0.0 from laplace() while uniform/bernoulli
/// draws stay live; algorithms stay oblivious to the debug mode.
class NoiseSource {
public:
    NoiseSource(uint64_t seed, uint64_t stream_id, bool zero_noise = false);

    /// Next raw 64-bit draw.
    uint64_t next_u64() noexcept;

    /// Uniform draw strictly inside (0,1); usable directly as an inverse-CDF input.
    double uniform01() noexcept;

    bool bernoulli(double p);

    /// Laplace draw via inverse CDF on one uniform; 0.0 in zero-noise mode.
    double laplace(LaplaceScale scale);
    double laplace(double scale) { return laplace(LaplaceScale(scale)); }

    /// Independent substream keyed by id, derived from this source's initial
    /// state (not its current position). Inherits the zero-noise flag.
    NoiseSource substream(uint64_t id) const noexcept;

    bool zero_noise() const noexcept { return zero_noise_; }
    uint64_t seed() const noexcept { return seed_; }
    uint64_t stream_id() const noexcept { return stream_id_; }

    /// Generator name recorded in experiment output metadata.
    static constexpr const char* kGeneratorName = "splitmix64";

private:
    NoiseSource() = default;

    uint64_t base_ = 0;   // derived initial state, anchor for substreams
    uint64_t state_ = 0;  // advances by the golden-gamma increment per draw
    uint64_t seed_ = 0;
    uint64_t stream_id_ = 0;
    bool zero_noise_ = false;
};

}  // namespace dpb
