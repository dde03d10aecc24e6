#pragma once

#include <string>
#include <vector>

#include "sodacer/dynamics.hpp"
#include "sodacer/linalg.hpp"

namespace sodacer {

// Affine barrier h(x) = offset + grad . x_aug over the augmented 6-dim state;
// h >= 0 is the safe side.
struct Barrier {
    std::string name;
    Vec6 grad{};
    double offset = 0.0;

    double value(const SystemState& state) const {
        const Vec6 y = state.augmented();
        double h = offset;
        for (int i = 0; i < 6; ++i) h += grad[i] * y[i];
        return h;
    }
};

struct BarrierSet {
    std::vector<Barrier> barriers;
    double gamma0 = 5.0;  // linear class-K gain
    int budget_index = -1;
};

// The box constraints of the five compartments (both faces) plus the budget
// cap: 11 barriers in total.
BarrierSet default_hpv_barriers(const HpvParameters& params);

// Per-barrier margin grad_h . RHS(x, u) + gamma0 * h(x); the budget barrier
// sees the quadratic spend rate through the augmented RHS.
std::vector<double> cbf_margin(const SystemState& state, const ControlVector& u,
                               const BarrierSet& barriers, const HpvParameters& params);

struct FilterResult {
    ControlVector u;
    bool intervened = false;     // anything beyond the nonnegativity clamp
    bool clamped = false;
    bool budget_cutoff = false;
    std::vector<int> barriers_hit;
};

// Minimal modification of a raw (symmetric-range) control so the one-sided
// bounds and all barrier margins hold:
//   1. clamp each coordinate to [0, cap_i];
//   2. for every violated state barrier, bisect a common backoff factor on
//      the coordinates that push the margin negative;
//   3. zero everything once the budget barrier is exhausted.
FilterResult safety_filter(const SystemState& state, const Vec5& u_raw,
                           const BarrierSet& barriers, const HpvParameters& params);

}  // namespace sodacer
