#pragma once

#include <array>

#include "sodacer/dynamics.hpp"
#include "sodacer/linalg.hpp"
#include "sodacer/replay.hpp"

namespace sodacer {

inline constexpr int kFeatureCount = 28;

using FeatureVec = std::array<double, kFeatureCount>;
// Row k holds the gradient of feature k w.r.t. the 5 tracking-error components.
using FeatureJacobian = std::array<Vec5, kFeatureCount>;

struct CriticWeights {
    FeatureVec w{};
};

// Cost shaping: state penalty Q (diagonal), discount rate, control-effort
// gains and saturation limits, and the tracking reference.
struct CostConfig {
    Vec5 q_diag{1.0, 1.0, 0.0, 1.0, 0.0};  // penalize the infection compartments
    double nu = 0.1;
    Vec5 phi_gain{1.0, 1.0, 1.0, 1.0, 1.0};
    Vec5 kappa{1.0, 1.0, 3.0, 3.0, 3.0};
    Vec5 x_ref{};
};

Vec5 tracking_error(const SystemState& state, const CostConfig& cfg);

// The 28 monomials: 5 linear, 5 squares, 6 female-male bilinear terms,
// 12 cubic cross terms. No constant term, so features(0) = 0.
FeatureVec features(const Vec5& e);

FeatureJacobian feature_jacobian(const Vec5& e);

// Value estimate phi(e)^T w.
double value(const Vec5& e, const CriticWeights& weights);

// Saturated policy u_i = -kappa_i * tanh(s_i) with
// s = (1 / (2 kappa_i phi_i)) * [g(x)^T grad_e value]_i.
// Output is raw: strictly inside (-kappa_i, kappa_i), possibly negative.
Vec5 control_law(const SystemState& state, const CriticWeights& weights, const CostConfig& cfg,
                 const HpvParameters& params);

// Closed-form control-effort penalty
//   2 sum_i kappa_i phi_i [ u_i atanh(u_i/kappa_i) + (kappa_i/2) ln(1 - u_i^2/kappa_i^2) ].
// At |u_i| = kappa_i the analytic limit kappa_i^2 phi_i ln4 is returned;
// beyond it SaturationBoundary is thrown.
double control_effort_cost(const Vec5& u, const CostConfig& cfg);

// Hamiltonian residual at a stored (state, control) pair:
//   e^T Q e + U(u) - nu phi^T w + (grad_e phi^T w)^T (f(x) + g(x) u).
double approx_hamiltonian(const Sample& sample, const CriticWeights& weights,
                          const CostConfig& cfg, const HpvParameters& params);

struct LossGrad {
    double loss = 0.0;
    FeatureVec grad{};
};

// Squared-residual loss 1/2 H^2 and its semi-gradient in the weights
// (the stored control is treated as a constant).
LossGrad critic_loss_and_gradient(const Sample& sample, const CriticWeights& weights,
                                  const CostConfig& cfg, const HpvParameters& params);

}  // namespace sodacer
