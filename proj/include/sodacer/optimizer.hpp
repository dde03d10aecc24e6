#pragma once

#include "sodacer/critic.hpp"

namespace sodacer {

// Moment-based weight updater: exponential moving averages of the gradient
// and of its square (or of the raw gradient in verbatim mode), bias-corrected,
// with a normalized step. One instance per training run.
struct OptimizerState {
    FeatureVec m{};
    FeatureVec v{};
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eta = 0.01;
    double eps0 = 1e-8;
    // When off, the second moment accumulates the raw gradient exactly as
    // written in the update recurrences; sqrt of a negative estimate then
    // surfaces as NonFiniteUpdate rather than being patched over.
    bool squared_second_moment = true;
};

struct UpdateResult {
    OptimizerState state;
    CriticWeights weights;
};

// One update step. Pure: returns fresh state and weights.
UpdateResult update(const OptimizerState& state, const CriticWeights& weights,
                    const FeatureVec& grad);

}  // namespace sodacer
