#include "sodacer/optimizer.hpp"

#include <cmath>

#include "sodacer/errors.hpp"

namespace sodacer {

UpdateResult update(const OptimizerState& state, const CriticWeights& weights,
                    const FeatureVec& grad) {
    UpdateResult out{state, weights};
    OptimizerState& s = out.state;
    s.step = state.step + 1;

    const double corr1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double corr2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));

    for (int k = 0; k < kFeatureCount; ++k) {
        const double g = grad[k];
        s.m[k] = s.beta1 * state.m[k] + (1.0 - s.beta1) * g;
        s.v[k] = s.beta2 * state.v[k] + (1.0 - s.beta2) * (s.squared_second_moment ? g * g : g);
        const double m_hat = s.m[k] / corr1;
        const double v_hat = s.v[k] / corr2;
        const double w_new = weights.w[k] - s.eta * m_hat / (std::sqrt(v_hat) + s.eps0);
        if (!std::isfinite(w_new))
            throw NonFiniteUpdate("optimizer produced a non-finite weight at coordinate " +
                                  std::to_string(k));
        out.weights.w[k] = w_new;
    }
    return out;
}

}  // namespace sodacer
