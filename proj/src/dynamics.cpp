#include "sodacer/dynamics.hpp"

#include <cmath>

#include "sodacer/errors.hpp"

namespace sodacer {

namespace {

Vec5 drift_at(const Vec5& x, const HpvParameters& p) {
    const double u_f = x[0], i_f = x[1], v_f = x[2], i_m = x[3], v_m = x[4];
    const double susceptible_f = 1.0 - u_f - i_f - v_f;
    const double exposure_f = (susceptible_f + p.epsilon * v_f) * p.beta_m * i_m;
    const double force_m = p.beta_f * u_f + p.beta_f_tilde * i_f;
    return {
        exposure_f * (1.0 - p.p) - (p.gamma_f + p.mu_f) * u_f,
        exposure_f * p.p - (p.gamma_f + p.mu_f) * i_f,
        -p.epsilon * p.beta_m * v_f * i_m - (p.mu_f + p.theta) * v_f,
        force_m * ((1.0 - i_m - v_m) + p.epsilon * v_m) - (p.gamma_m + p.mu_m) * i_m,
        -force_m * p.epsilon * v_m - (p.mu_m + p.theta) * v_m,
    };
}

Mat5 control_matrix_at(const Vec5& x, const HpvParameters& p) {
    Mat5 g{};
    g[0][4] = -x[0];                          // screening moves unaware females out
    g[1][4] = x[0];                           // ...and into the aware compartment
    g[2][0] = p.mu_f;                         // childhood vaccination inflow
    g[2][2] = 1.0 - x[0] - x[1] - x[2];       // adult vaccination of susceptibles
    g[4][1] = p.mu_m;
    g[4][3] = 1.0 - x[3] - x[4];
    return g;
}

// Clamp dust threshold: RK4 can land a hair outside the box through pure
// rounding; only excursions beyond this count as observable clamp events.
constexpr double kClampDust = 1e-12;

}  // namespace

Vec5 hpv_drift(const SystemState& state, const HpvParameters& params) {
    return drift_at(state.compartments(), params);
}

Mat5 hpv_control_matrix(const SystemState& state, const HpvParameters& params) {
    return control_matrix_at(state.compartments(), params);
}

double running_cost_rate(const ControlVector& c, const HpvParameters& p) {
    return 0.5 * (p.a1_over_a0 * (c.w1 * c.w1 + c.w2 * c.w2) +
                  p.a2_over_a0 * (c.u1 * c.u1 + c.u2 * c.u2) +
                  p.a3_over_a0 * c.alpha * c.alpha);
}

Vec6 augmented_rhs(const Vec6& y, const ControlVector& controls, const HpvParameters& params) {
    const Vec5 x{y[0], y[1], y[2], y[3], y[4]};
    const Vec5 f = drift_at(x, params);
    const Vec5 gu = matvec(control_matrix_at(x, params), controls.as_array());
    Vec6 out;
    for (int i = 0; i < 5; ++i) out[i] = f[i] + gu[i];
    out[5] = running_cost_rate(controls, params);
    return out;
}

StepResult integrate_step(const SystemState& state, const ControlVector& controls,
                          const HpvParameters& params, double dt) {
    const Vec6 y0 = state.augmented();

    const Vec6 k1 = augmented_rhs(y0, controls, params);
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = y0[i] + 0.5 * dt * k1[i];
    const Vec6 k2 = augmented_rhs(y, controls, params);
    for (int i = 0; i < 6; ++i) y[i] = y0[i] + 0.5 * dt * k2[i];
    const Vec6 k3 = augmented_rhs(y, controls, params);
    for (int i = 0; i < 6; ++i) y[i] = y0[i] + dt * k3[i];
    const Vec6 k4 = augmented_rhs(y, controls, params);

    Vec6 y1;
    for (int i = 0; i < 6; ++i)
        y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (!all_finite(y1))
        throw NonFiniteState("integrate_step: non-finite component after RK4 step");

    StepResult result;
    for (int i = 0; i < 5; ++i) {
        const double raw = y1[i];
        y1[i] = clamp01(raw);
        if (raw < -kClampDust || raw > 1.0 + kClampDust) ++result.clamp_events;
    }
    result.state = SystemState::from_augmented(y1);
    return result;
}

}  // namespace sodacer
