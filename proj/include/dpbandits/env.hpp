#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dpbandits/noise.hpp"

namespace dpb {

/// Mean profile with one optimal arm at 0.75 and all suboptimal means 0.7.
std::vector<double> means_c1(uint32_t num_arms);

/// Linearly decreasing means from 0.75 down to 0.25.
std::vector<double> means_c2(uint32_t num_arms);

/// Convex quadratic means: mu_i = a(i-K)^2 + 0.25 with mu_1 = 0.75, a > 0.
std::vector<double> means_c3(uint32_t num_arms);

/// Concave quadratic means: mu_i = a(i-1)^2 + 0.75 with mu_K = 0.25, a < 0.
std::vector<double> means_c4(uint32_t num_arms);

/// Mean vector for a named setting in {c1, c2, c3, c4}.
std::vector<double> means_for_setting(std::string_view setting, uint32_t num_arms);

/// Bernoulli bandit instance: fixed mean vector, per-arm suboptimality gaps
/// and a reward sampler. Immutable after construction. In deterministic mode
/// every pull returns the arm's mean exactly (debug fixture for regression
/// traces); rewards stay inside [0,1] either way.
class BanditEnvironment {
public:
    explicit BanditEnvironment(std::vector<double> means, bool deterministic = false);

    uint32_t num_arms() const noexcept { return static_cast<uint32_t>(means_.size()); }
    double mean(uint32_t arm) const { return means_.at(arm); }
    const std::vector<double>& means() const noexcept { return means_; }
    uint32_t optimal_arm() const noexcept { return optimal_; }
    bool deterministic() const noexcept { return deterministic_; }

    /// Suboptimality gap of an arm: mu* - mu_a (0 for the optimal arm).
    double gap(uint32_t arm) const { return means_[optimal_] - means_.at(arm); }

    /// One reward draw for an arm; randomness comes from the caller's source.
    double pull(uint32_t arm, NoiseSource& rewards) const;

    /// Pseudo-regret increment of pulling an arm; equals the arm's gap.
    double regret_increment(uint32_t arm) const { return gap(arm); }

private:
    std::vector<double> means_;
    uint32_t optimal_;
    bool deterministic_;
};

}  // namespace dpb
