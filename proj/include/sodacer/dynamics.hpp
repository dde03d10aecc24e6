#pragma once

#include "sodacer/linalg.hpp"

namespace sodacer {

// Compartmental state of the HPV transmission model, population fractions,
// plus the accumulated intervention budget as a sixth integrated component.
struct SystemState {
    double u_f = 0.0;  // unaware infectious females
    double i_f = 0.0;  // aware infectious females
    double v_f = 0.0;  // vaccinated females
    double i_m = 0.0;  // infectious males
    double v_m = 0.0;  // vaccinated males
    double j_cost = 0.0;

    Vec5 compartments() const { return {u_f, i_f, v_f, i_m, v_m}; }
    Vec6 augmented() const { return {u_f, i_f, v_f, i_m, v_m, j_cost}; }

    static SystemState from_augmented(const Vec6& y) {
        return {y[0], y[1], y[2], y[3], y[4], y[5]};
    }
};

// Intervention rates, ordered (w1, w2, u1, u2, alpha):
// childhood vaccination f/m, adult vaccination f/m, screening.
struct ControlVector {
    double w1 = 0.0;
    double w2 = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double alpha = 0.0;

    Vec5 as_array() const { return {w1, w2, u1, u2, alpha}; }

    static ControlVector from_array(const Vec5& u) { return {u[0], u[1], u[2], u[3], u[4]}; }
};

// Model parameters; defaults are the mean calibration used throughout.
struct HpvParameters {
    double epsilon = 0.1;          // vaccine escape fraction
    double theta = 0.1;            // waning rate, 1/year
    double beta_m = 4.0;           // male-to-female transmission, 1/year
    double beta_f = 4.0;           // unaware-female-to-male transmission, 1/year
    double beta_f_tilde = 2.0;     // aware-female-to-male transmission, 1/year
    double gamma_f = 1.0 / 1.3;    // female recovery, 1/year
    double gamma_m = 1.0 / 0.6;    // male recovery, 1/year
    double p = 0.2;                // fraction symptomatic at infection
    double mu_f = 1.0 / 30.0;      // female demographic turnover, 1/year
    double mu_m = 1.0 / 30.0;      // male demographic turnover, 1/year
    double a1_over_a0 = 0.5;       // childhood vaccination cost weight
    double a2_over_a0 = 0.2;       // adult vaccination cost weight
    double a3_over_a0 = 0.4;       // screening cost weight
    double u_max = 3.0;            // adult vaccination cap, 1/year
    double alpha_max = 3.0;        // screening cap, 1/year
    double j_max = 200.0;          // budget cap
};

// Control-free part of the state ODEs, f(x).
Vec5 hpv_drift(const SystemState& state, const HpvParameters& params);

// Control coupling g(x): full state RHS = hpv_drift + g * controls.
// Rows follow the state layout, columns (w1, w2, u1, u2, alpha).
Mat5 hpv_control_matrix(const SystemState& state, const HpvParameters& params);

// Budget ODE right-hand side: quadratic intervention spend rate.
double running_cost_rate(const ControlVector& controls, const HpvParameters& params);

// Full RHS of the 6-dimensional augmented system at an arbitrary point
// (RK4 stages may sit slightly outside the unit box).
Vec6 augmented_rhs(const Vec6& y, const ControlVector& controls, const HpvParameters& params);

struct StepResult {
    SystemState state;
    int clamp_events = 0;  // components pulled back into [0,1] by more than fp dust
};

// One classical RK4 step under zero-order-hold controls, followed by
// clamping of the five compartments to [0,1]. Throws NonFiniteState when
// the step produces NaN/Inf.
StepResult integrate_step(const SystemState& state, const ControlVector& controls,
                          const HpvParameters& params, double dt);

}  // namespace sodacer
