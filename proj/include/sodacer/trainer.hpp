#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sodacer/critic.hpp"
#include "sodacer/dynamics.hpp"
#include "sodacer/optimizer.hpp"
#include "sodacer/replay.hpp"
#include "sodacer/safety.hpp"

namespace sodacer {

enum class ReplayKind { sodacer, rer, cber };

std::string to_string(ReplayKind kind);
ReplayKind replay_kind_from_string(const std::string& name);

enum class WeightInit { zeros, uniform };

struct TrainerConfig {
    double delta = 1e-4;        // weight-convergence tolerance
    int max_inner_iters = 200;  // cap on the optimization loop per outer step
    double horizon = 20.0;      // years
    double dt = 0.01;           // years
    ReplayKind replay_kind = ReplayKind::sodacer;
    std::uint64_t seed = 0;
    WeightInit w0 = WeightInit::zeros;
    double w0_range = 0.01;     // half-width of the uniform init
    int snapshot_every = 100;   // outer steps between cluster snapshots
    double gamma0 = 5.0;        // barrier gain
    bool log_optimizer = false; // record (step, |grad|, |dw|) per inner iteration
    int run_id = 0;
};

struct TrajectoryPoint {
    double t = 0.0;
    SystemState state;
    Vec5 u_raw{};
    Vec5 u_filtered{};
    double value = 0.0;
    double objective = 0.0;  // running discounted cost accumulation
};

struct SafetyEvent {
    double t = 0.0;
    std::vector<int> barriers;
    Vec5 u_raw{};
    Vec5 u_filtered{};
};

struct ClusterSnapshot {
    double t = 0.0;
    std::vector<Cluster> clusters;
};

struct Diagnostics {
    long clamp_events = 0;
    long safety_interventions = 0;
    long budget_cutoffs = 0;
    long inner_iters = 0;
    long outer_steps = 0;
    long samples_generated = 0;
    long pruned_mass = 0;
    long fast_size = 0;
    long slow_mass = 0;
    long cluster_count = 0;
};

struct RunResult {
    std::vector<TrajectoryPoint> trajectory;
    CriticWeights final_weights;
    double objective = 0.0;         // discounted quadratic-plus-effort accumulation
    double objective_spread = 0.0;  // plain infection-burden integral
    std::vector<ClusterSnapshot> buffer_trace;
    std::vector<SafetyEvent> safety_events;
    std::vector<std::array<double, 3>> optimizer_trace;  // (inner step, |grad|, |dw|)
    Diagnostics diagnostics;
    int run_id = 0;
};

// Closed-loop training episode: act with the saturated policy (masked, then
// safety-filtered), integrate, feed the dual replay structure, and fit the
// critic on a fresh mini-batch each outer step until the horizon.
RunResult train_episode(const TrainerConfig& cfg, const CostConfig& cost_cfg,
                        const ReplayConfig& replay_cfg, const OptimizerState& opt0,
                        const HpvParameters& params, const SystemState& x0,
                        const std::array<bool, 5>& mask);

// Open-loop rollout under constant controls; no learning, no buffers.
RunResult rollout_constant(const ControlVector& controls, const HpvParameters& params,
                           const SystemState& x0, double horizon, double dt,
                           const CostConfig& cost_cfg = CostConfig{});

}  // namespace sodacer
