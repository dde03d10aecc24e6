#include "sodacer/safety.hpp"

#include <algorithm>
#include <cmath>

namespace sodacer {

namespace {

constexpr double kMarginTol = 1e-9;
constexpr int kBisectionRounds = 20;
constexpr int kMaxPasses = 8;

const char* kCompartmentNames[5] = {"u_f", "i_f", "v_f", "i_m", "v_m"};

Vec5 control_caps(const HpvParameters& p) {
    return {1.0, 1.0, p.u_max, p.u_max, p.alpha_max};
}

double state_barrier_margin(const Barrier& b, const SystemState& state, const Vec5& u,
                            const BarrierSet& set, const HpvParameters& params) {
    const Vec6 rhs = augmented_rhs(state.augmented(), ControlVector::from_array(u), params);
    double m = set.gamma0 * b.value(state);
    for (int i = 0; i < 6; ++i) m += b.grad[i] * rhs[i];
    return m;
}

}  // namespace

BarrierSet default_hpv_barriers(const HpvParameters& params) {
    BarrierSet set;
    for (int k = 0; k < 5; ++k) {
        Barrier low;
        low.name = std::string(kCompartmentNames[k]) + "_low";
        low.grad[k] = 1.0;
        set.barriers.push_back(low);

        Barrier high;
        high.name = std::string(kCompartmentNames[k]) + "_high";
        high.grad[k] = -1.0;
        high.offset = 1.0;
        set.barriers.push_back(high);
    }
    Barrier budget;
    budget.name = "budget";
    budget.grad[5] = -1.0;
    budget.offset = params.j_max;
    set.budget_index = static_cast<int>(set.barriers.size());
    set.barriers.push_back(budget);
    return set;
}

std::vector<double> cbf_margin(const SystemState& state, const ControlVector& u,
                               const BarrierSet& barriers, const HpvParameters& params) {
    const Vec6 rhs = augmented_rhs(state.augmented(), u, params);
    std::vector<double> margins;
    margins.reserve(barriers.barriers.size());
    for (const Barrier& b : barriers.barriers) {
        double m = barriers.gamma0 * b.value(state);
        for (int i = 0; i < 6; ++i) m += b.grad[i] * rhs[i];
        margins.push_back(m);
    }
    return margins;
}

FilterResult safety_filter(const SystemState& state, const Vec5& u_raw,
                           const BarrierSet& barriers, const HpvParameters& params) {
    FilterResult result;
    const Vec5 caps = control_caps(params);

    Vec5 u;
    for (int i = 0; i < 5; ++i) {
        u[i] = std::clamp(u_raw[i], 0.0, caps[i]);
        if (u[i] != u_raw[i]) result.clamped = true;
    }

    // budget exhausted: no further spend at all
    if (barriers.budget_index >= 0 &&
        barriers.barriers[static_cast<std::size_t>(barriers.budget_index)].value(state) <= 0.0) {
        result.u = ControlVector{};
        result.budget_cutoff = true;
        result.intervened = true;
        return result;
    }

    const Mat5 g = hpv_control_matrix(state, params);

    // which coordinates push a given barrier's margin down at the current u
    auto offenders_of = [&](const Barrier& b, const Vec5& current) {
        Vec5 a{};
        for (int i = 0; i < 5; ++i)
            for (int r = 0; r < 5; ++r) a[i] += b.grad[r] * g[r][i];
        std::array<bool, 5> offending{};
        for (int i = 0; i < 5; ++i) offending[i] = a[i] * current[i] < 0.0;
        return offending;
    };

    for (int pass = 0; pass < kMaxPasses; ++pass) {
        bool any_actionable = false;
        for (std::size_t bi = 0; bi < barriers.barriers.size(); ++bi) {
            if (static_cast<int>(bi) == barriers.budget_index) continue;
            const Barrier& b = barriers.barriers[bi];
            if (state_barrier_margin(b, state, u, barriers, params) >= -kMarginTol) continue;

            const std::array<bool, 5> offending = offenders_of(b, u);
            bool have_offender = false;
            for (bool o : offending) have_offender = have_offender || o;
            // a violation with no control contribution cannot be fixed here
            if (!have_offender) continue;
            any_actionable = true;

            auto margin_at = [&](double lambda) {
                Vec5 trial = u;
                for (int i = 0; i < 5; ++i)
                    if (offending[i]) trial[i] = lambda * u[i];
                return state_barrier_margin(b, state, trial, barriers, params);
            };

            double lo = 0.0, hi = 1.0;
            for (int round = 0; round < kBisectionRounds; ++round) {
                const double mid = 0.5 * (lo + hi);
                if (margin_at(mid) >= 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            for (int i = 0; i < 5; ++i)
                if (offending[i]) u[i] = lo * u[i];

            result.intervened = true;
            result.barriers_hit.push_back(static_cast<int>(bi));
        }
        if (!any_actionable) break;
    }

    // if bisection could not settle a barrier, drop its offenders outright
    for (std::size_t bi = 0; bi < barriers.barriers.size(); ++bi) {
        if (static_cast<int>(bi) == barriers.budget_index) continue;
        const Barrier& b = barriers.barriers[bi];
        if (state_barrier_margin(b, state, u, barriers, params) >= -kMarginTol) continue;
        const std::array<bool, 5> offending = offenders_of(b, u);
        for (int i = 0; i < 5; ++i)
            if (offending[i]) {
                u[i] = 0.0;
                result.intervened = true;
            }
    }

    result.u = ControlVector::from_array(u);
    return result;
}

}  // namespace sodacer
