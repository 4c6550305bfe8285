#include "dpbandits/tree.hpp"

#include <cmath>
#include <stdexcept>

namespace dpb {

namespace {

uint64_t ceil_log2(uint64_t n) {
    uint64_t d = 0;
    uint64_t p = 1;
    while (p < n) {
        p <<= 1;
        ++d;
    }
    return d;
}

}  // namespace

TreeCounter::TreeCounter(uint64_t horizon, double epsilon, NoiseSource noise)
    : horizon_(horizon),
      depth_(std::max<uint64_t>(1, ceil_log2(horizon))),
      node_scale_(0.0),
      base_(noise) {
    if (horizon < 1) {
        throw std::invalid_argument("TreeCounter: horizon must be >= 1");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("TreeCounter: epsilon must be > 0");
    }
    node_scale_ = static_cast<double>(depth_) / epsilon;
}

void TreeCounter::add(double value) {
    if (count_ >= horizon_) {
        throw std::runtime_error("TreeCounter: capacity exceeded");
    }
    if (!(value >= 0.0) || !(value <= 1.0)) {
        throw std::runtime_error("TreeCounter: value outside [0,1]");
    }
    ++count_;
    raw_ += value;
}

std::vector<uint64_t> TreeCounter::covering_nodes(uint64_t t) const {
    std::vector<uint64_t> nodes;
    if (t == 0) {
        return nodes;
    }
    // Greedy dyadic decomposition of [1, t], largest blocks first. Block
    // (level l, index i) has heap id 2^(depth-l) + i; the root block (the
    // full range) is not part of the noised set, so the top usable level is
    // depth-1 and the decomposition stays within depth blocks for horizons
    // of at least 4.
    uint64_t pos = 0;
    for (uint64_t level = depth_; level-- > 0;) {
        const uint64_t size = uint64_t{1} << level;
        while (t - pos >= size) {
            nodes.push_back((uint64_t{1} << (depth_ - level)) + (pos >> level));
            pos += size;
        }
        if (pos == t) {
            break;
        }
    }
    return nodes;
}

std::vector<uint64_t> TreeCounter::touching_nodes(uint64_t element) const {
    if (element < 1 || element > horizon_) {
        throw std::domain_error("TreeCounter: element index out of range");
    }
    std::vector<uint64_t> nodes;
    nodes.reserve(depth_);
    uint64_t id = (uint64_t{1} << depth_) + (element - 1);
    while (id >= 2) {
        nodes.push_back(id);
        id >>= 1;
    }
    return nodes;
}

double TreeCounter::node_noise(uint64_t node_id) const {
    return base_.substream(node_id).laplace(node_scale_);
}

double TreeCounter::sum() const {
    if (count_ == 0) {
        throw std::logic_error("TreeCounter: sum() on an empty counter");
    }
    double noisy = raw_;
    for (uint64_t id : covering_nodes(count_)) {
        noisy += node_noise(id);
    }
    return noisy;
}

}  // namespace dpb
