#include "sodacer/batch.hpp"

#include <exception>
#include <vector>

namespace sodacer {

namespace {

BatchGradient reduce_in_order(const std::vector<LossGrad>& slots) {
    BatchGradient out;
    for (const LossGrad& s : slots) {
        out.mean_loss += s.loss;
        for (int k = 0; k < kFeatureCount; ++k) out.grad[k] += s.grad[k];
    }
    const double inv = 1.0 / static_cast<double>(slots.size());
    out.mean_loss *= inv;
    for (int k = 0; k < kFeatureCount; ++k) out.grad[k] *= inv;
    return out;
}

}  // namespace

BatchGradient batch_gradient_serial(std::span<const Sample> batch, const CriticWeights& weights,
                                    const CostConfig& cfg, const HpvParameters& params) {
    std::vector<LossGrad> slots(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        slots[i] = critic_loss_and_gradient(batch[i], weights, cfg, params);
    return reduce_in_order(slots);
}

BatchGradient batch_gradient(std::span<const Sample> batch, const CriticWeights& weights,
                             const CostConfig& cfg, const HpvParameters& params) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(batch.size());
    std::vector<LossGrad> slots(batch.size());
    std::exception_ptr failure;  // exceptions must not unwind through the omp region
#pragma omp parallel for schedule(static) if (n > 256)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            slots[static_cast<std::size_t>(i)] =
                critic_loss_and_gradient(batch[static_cast<std::size_t>(i)], weights, cfg, params);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return reduce_in_order(slots);
}

}  // namespace sodacer
