#include "dpbandits/noise.hpp"

#include <cmath>

namespace dpb {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Stafford mix13).
constexpr uint64_t mix64(uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Key derivation for (key, id) pairs; both arguments get a full avalanche
// before they are combined, so related ids map to unrelated stream states.
constexpr uint64_t derive_stream(uint64_t key, uint64_t id) noexcept {
    return mix64(mix64(key + kGamma) + (id + 1) * kGamma);
}

}  // namespace

double laplace_inverse_cdf(double u, LaplaceScale scale) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::domain_error("laplace_inverse_cdf: u must lie in (0,1)");
    }
    const double d = u - 0.5;
    if (d == 0.0) {
        return 0.0;
    }
    const double sign = d > 0.0 ? 1.0 : -1.0;
    return -scale.value() * sign * std::log(1.0 - 2.0 * std::fabs(d));
}

double laplace_tail(double tau, LaplaceScale scale) {
    if (!(tau >= 0.0)) {
        throw std::domain_error("laplace_tail: tau must be >= 0");
    }
    return std::exp(-tau / scale.value());
}

double hoeffding_radius(uint64_t t, double support_halfwidth, double delta) {
    if (t < 1) {
        throw std::domain_error("hoeffding_radius: t must be >= 1");
    }
    if (!(support_halfwidth > 0.0)) {
        throw std::domain_error("hoeffding_radius: support half-width must be > 0");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::domain_error("hoeffding_radius: delta must lie in (0,1)");
    }
    return support_halfwidth * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(t)));
}

double fact1_lhs(double a, double x) {
    if (!(a > 1.0)) {
        throw std::domain_error("fact1_lhs: a must be > 1");
    }
    if (!(x > std::exp(1.0))) {
        throw std::domain_error("fact1_lhs: x must be > e");
    }
    return std::log(a * std::log(x)) / x;
}

NoiseSource::NoiseSource(uint64_t seed, uint64_t stream_id, bool zero_noise)
    : base_(derive_stream(seed, stream_id)),
      state_(base_),
      seed_(seed),
      stream_id_(stream_id),
      zero_noise_(zero_noise) {}

uint64_t NoiseSource::next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
}

double NoiseSource::uniform01() noexcept {
    // (i + 1/2) / 2^53 with i uniform over [0, 2^53): never 0, never 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool NoiseSource::bernoulli(double p) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
        throw std::domain_error("bernoulli: p must lie in [0,1]");
    }
    return uniform01() < p;
}

double NoiseSource::laplace(LaplaceScale scale) {
    if (zero_noise_) {
        return 0.0;
    }
    return laplace_inverse_cdf(uniform01(), scale);
}

NoiseSource NoiseSource::substream(uint64_t id) const noexcept {
    NoiseSource child;
    child.base_ = derive_stream(base_, id);
    child.state_ = child.base_;
    child.seed_ = seed_;
    child.stream_id_ = id;
    child.zero_noise_ = zero_noise_;
    return child;
}

}  // namespace dpb
