#include "sodacer/critic.hpp"

#include <cmath>
#include <string>

#include "sodacer/errors.hpp"

namespace sodacer {

namespace {

// Each feature is e[a]^pa * e[b] (b < 0 when the second factor is absent).
// Error components are indexed in state order (U_f, I_f, V_f, I_m, V_m);
// the table encodes the activation list's own ordering.
struct Monomial {
    int a;
    int pa;
    int b;
};

constexpr Monomial kFeatures[kFeatureCount] = {
    {0, 1, -1}, {3, 1, -1}, {4, 1, -1}, {1, 1, -1}, {2, 1, -1},  // U_f I_m V_m I_f V_f
    {0, 2, -1}, {1, 2, -1}, {2, 2, -1}, {3, 2, -1}, {4, 2, -1},  // squares
    {0, 1, 3},  {0, 1, 4},  {1, 1, 3},  {1, 1, 4},  {2, 1, 3},  {2, 1, 4},  // bilinear f x m
    {0, 2, 3},  {0, 2, 4},  {1, 2, 3},  {1, 2, 4},                          // U_f^2, I_f^2 x m
    {3, 2, 0},  {3, 2, 1},  {3, 2, 2},                                      // I_m^2 x f
    {2, 2, 3},  {2, 2, 4},                                                  // V_f^2 x m
    {4, 2, 0},  {4, 2, 1},  {4, 2, 2},                                      // V_m^2 x f
};

double eval_monomial(const Monomial& m, const Vec5& e) {
    double v = m.pa == 2 ? e[m.a] * e[m.a] : e[m.a];
    if (m.b >= 0) v *= e[m.b];
    return v;
}

}  // namespace

Vec5 tracking_error(const SystemState& state, const CostConfig& cfg) {
    const Vec5 x = state.compartments();
    Vec5 e;
    for (int i = 0; i < 5; ++i) e[i] = x[i] - cfg.x_ref[i];
    return e;
}

FeatureVec features(const Vec5& e) {
    FeatureVec out;
    for (int k = 0; k < kFeatureCount; ++k) out[k] = eval_monomial(kFeatures[k], e);
    return out;
}

FeatureJacobian feature_jacobian(const Vec5& e) {
    FeatureJacobian jac{};
    for (int k = 0; k < kFeatureCount; ++k) {
        const Monomial& m = kFeatures[k];
        const double second = m.b >= 0 ? e[m.b] : 1.0;
        jac[k][m.a] = (m.pa == 2 ? 2.0 * e[m.a] : 1.0) * second;
        if (m.b >= 0) jac[k][m.b] += m.pa == 2 ? e[m.a] * e[m.a] : e[m.a];
    }
    return jac;
}

double value(const Vec5& e, const CriticWeights& weights) {
    const FeatureVec phi = features(e);
    double s = 0.0;
    for (int k = 0; k < kFeatureCount; ++k) s += phi[k] * weights.w[k];
    return s;
}

Vec5 control_law(const SystemState& state, const CriticWeights& weights, const CostConfig& cfg,
                 const HpvParameters& params) {
    const Vec5 e = tracking_error(state, cfg);
    const FeatureJacobian jac = feature_jacobian(e);

    Vec5 value_grad{};  // grad_e of phi^T w
    for (int k = 0; k < kFeatureCount; ++k)
        for (int c = 0; c < 5; ++c) value_grad[c] += jac[k][c] * weights.w[k];

    const Mat5 g = hpv_control_matrix(state, params);
    const Vec5 s = matvec_transposed(g, value_grad);

    Vec5 u;
    for (int i = 0; i < 5; ++i)
        u[i] = -cfg.kappa[i] * std::tanh(s[i] / (2.0 * cfg.kappa[i] * cfg.phi_gain[i]));
    return u;
}

double control_effort_cost(const Vec5& u, const CostConfig& cfg) {
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double k = cfg.kappa[i];
        const double r = u[i] / k;
        if (std::abs(r) > 1.0)
            throw SaturationBoundary("control_effort_cost: |u_" + std::to_string(i + 1) +
                                     "| exceeds its saturation limit");
        if (std::abs(r) == 1.0) {
            total += k * k * cfg.phi_gain[i] * std::log(4.0);
            continue;
        }
        total += 2.0 * k * cfg.phi_gain[i] *
                 (u[i] * std::atanh(r) + 0.5 * k * std::log1p(-r * r));
    }
    return total;
}

namespace {

struct HamiltonianTerms {
    double h = 0.0;
    FeatureVec dh_dw{};
};

// H = e^T Q e + U(u) + w^T (-nu phi + J rhs); the bracket is also dH/dw.
HamiltonianTerms hamiltonian_terms(const Sample& sample, const CriticWeights& weights,
                                   const CostConfig& cfg, const HpvParameters& params) {
    SystemState state;
    state.u_f = sample.x[0];
    state.i_f = sample.x[1];
    state.v_f = sample.x[2];
    state.i_m = sample.x[3];
    state.v_m = sample.x[4];

    const Vec5 e = tracking_error(state, cfg);
    const FeatureVec phi = features(e);
    const FeatureJacobian jac = feature_jacobian(e);

    const Vec5 f = hpv_drift(state, params);
    const Vec5 gu = matvec(hpv_control_matrix(state, params), sample.u);
    Vec5 rhs;
    for (int i = 0; i < 5; ++i) rhs[i] = f[i] + gu[i];

    HamiltonianTerms out;
    double wdot = 0.0;
    for (int k = 0; k < kFeatureCount; ++k) {
        out.dh_dw[k] = -cfg.nu * phi[k] + dot(jac[k], rhs);
        wdot += weights.w[k] * out.dh_dw[k];
    }

    double state_cost = 0.0;
    for (int i = 0; i < 5; ++i) state_cost += cfg.q_diag[i] * e[i] * e[i];

    out.h = state_cost + control_effort_cost(sample.u, cfg) + wdot;
    return out;
}

}  // namespace

double approx_hamiltonian(const Sample& sample, const CriticWeights& weights,
                          const CostConfig& cfg, const HpvParameters& params) {
    return hamiltonian_terms(sample, weights, cfg, params).h;
}

LossGrad critic_loss_and_gradient(const Sample& sample, const CriticWeights& weights,
                                  const CostConfig& cfg, const HpvParameters& params) {
    const HamiltonianTerms terms = hamiltonian_terms(sample, weights, cfg, params);
    LossGrad out;
    out.loss = 0.5 * terms.h * terms.h;
    for (int k = 0; k < kFeatureCount; ++k) out.grad[k] = terms.h * terms.dh_dw[k];
    return out;
}

}  // namespace sodacer
