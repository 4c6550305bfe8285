#pragma once

#include <cstdint>
#include <vector>

#include "dpbandits/noise.hpp"

namespace dpb {

/// Binary counting mechanism for private prefix sums over a stream of values
/// in [0,1] with a horizon declared up front.
///
/// The stream is covered by dyadic blocks of sizes 1 .. 2^(depth-1) with
/// depth = ceil(log2(horizon)); each block carries one Laplace(depth/eps)
/// noise value keyed by its node index, so every stream element sits in
/// exactly `depth` noised blocks (its root-to-leaf path) and the mechanism is
/// eps-differentially private. A prefix query returns the exact running sum
/// plus the noise of the blocks covering [1, count].
///
/// Node noise is a pure function of (noise source, node index): queries at the
/// same count are bit-identical and independent of query order.
class TreeCounter {
public:
    TreeCounter(uint64_t horizon, double epsilon, NoiseSource noise);

    /// Append the next stream value. Throws past the horizon or outside [0,1].
    void add(double value);

    /// Noisy prefix sum over everything added so far. Throws on an empty counter.
    double sum() const;

    uint64_t count() const noexcept { return count_; }
    double raw_sum() const noexcept { return raw_; }
    uint64_t horizon() const noexcept { return horizon_; }
    uint64_t depth() const noexcept { return depth_; }
    double node_scale() const noexcept { return node_scale_; }

    /// Node ids of the dyadic blocks covering the prefix [1, t].
    std::vector<uint64_t> covering_nodes(uint64_t t) const;

    /// Node ids of every noised block containing stream element s (1-based):
    /// the blocks along one root-to-leaf path, exactly depth() of them.
    std::vector<uint64_t> touching_nodes(uint64_t element) const;

    /// Laplace noise attached to one node.
    double node_noise(uint64_t node_id) const;

private:
    uint64_t horizon_;
    uint64_t depth_;
    double node_scale_;
    NoiseSource base_;
    uint64_t count_ = 0;
    double raw_ = 0.0;
};

}  // namespace dpb
