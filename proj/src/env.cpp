#include "dpbandits/env.hpp"

#include <stdexcept>
#include <string>

namespace dpb {

namespace {

void require_arms(uint32_t num_arms) {
    if (num_arms < 2) {
        throw std::invalid_argument("mean profile requires at least 2 arms");
    }
}

}  // namespace

std::vector<double> means_c1(uint32_t num_arms) {
    require_arms(num_arms);
    std::vector<double> means(num_arms, 0.7);
    means[0] = 0.75;
    return means;
}

std::vector<double> means_c2(uint32_t num_arms) {
    require_arms(num_arms);
    std::vector<double> means(num_arms);
    for (uint32_t i = 0; i < num_arms; ++i) {
        means[i] = 0.75 - 0.5 * static_cast<double>(i) / static_cast<double>(num_arms - 1);
    }
    return means;
}

std::vector<double> means_c3(uint32_t num_arms) {
    require_arms(num_arms);
    const double span = static_cast<double>(num_arms - 1);
    const double a = 0.5 / (span * span);
    std::vector<double> means(num_arms);
    for (uint32_t i = 0; i < num_arms; ++i) {
        const double d = static_cast<double>(i + 1) - static_cast<double>(num_arms);
        means[i] = a * d * d + 0.25;
    }
    return means;
}

std::vector<double> means_c4(uint32_t num_arms) {
    require_arms(num_arms);
    const double span = static_cast<double>(num_arms - 1);
    const double a = -0.5 / (span * span);
    std::vector<double> means(num_arms);
    for (uint32_t i = 0; i < num_arms; ++i) {
        const double d = static_cast<double>(i);
        means[i] = a * d * d + 0.75;
    }
    return means;
}

std::vector<double> means_for_setting(std::string_view setting, uint32_t num_arms) {
    if (setting == "c1") return means_c1(num_arms);
    if (setting == "c2") return means_c2(num_arms);
    if (setting == "c3") return means_c3(num_arms);
    if (setting == "c4") return means_c4(num_arms);
    throw std::invalid_argument("unknown setting: " + std::string(setting));
}

BanditEnvironment::BanditEnvironment(std::vector<double> means, bool deterministic)
    : means_(std::move(means)), optimal_(0), deterministic_(deterministic) {
    if (means_.size() < 2) {
        throw std::invalid_argument("BanditEnvironment: need at least 2 arms");
    }
    for (size_t i = 0; i < means_.size(); ++i) {
        if (!(means_[i] >= 0.0) || !(means_[i] <= 1.0)) {
            throw std::invalid_argument("BanditEnvironment: means must lie in [0,1]");
        }
        if (means_[i] > means_[optimal_]) {
            optimal_ = static_cast<uint32_t>(i);
        }
    }
}

double BanditEnvironment::pull(uint32_t arm, NoiseSource& rewards) const {
    const double mu = means_.at(arm);
    if (deterministic_) {
        return mu;
    }
    return rewards.bernoulli(mu) ? 1.0 : 0.0;
}

}  // namespace dpb
