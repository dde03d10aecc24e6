#pragma once

#include <span>

#include "sodacer/critic.hpp"

namespace sodacer {

struct BatchGradient {
    double mean_loss = 0.0;
    FeatureVec grad{};  // mean of the per-sample gradients
};

// Serial reference implementation of the mini-batch gradient.
BatchGradient batch_gradient_serial(std::span<const Sample> batch, const CriticWeights& weights,
                                    const CostConfig& cfg, const HpvParameters& params);

// OpenMP version. Per-sample results are written to private slots and summed
// in index order, so the result is bit-identical to the serial reference for
// any thread count.
BatchGradient batch_gradient(std::span<const Sample> batch, const CriticWeights& weights,
                             const CostConfig& cfg, const HpvParameters& params);

}  // namespace sodacer
