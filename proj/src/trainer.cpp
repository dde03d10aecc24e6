#include "sodacer/trainer.hpp"

#include <cmath>
#include <utility>

#include "sodacer/batch.hpp"
#include "sodacer/errors.hpp"
#include "sodacer/rng.hpp"

namespace sodacer {

namespace {

enum : std::uint64_t { kStreamBatch = 1, kStreamInit = 2 };

double state_cost(const Vec5& e, const CostConfig& cfg) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += cfg.q_diag[i] * e[i] * e[i];
    return s;
}

double infection_burden(const SystemState& x) { return x.u_f + x.i_f + x.i_m; }

}  // namespace

std::string to_string(ReplayKind kind) {
    switch (kind) {
        case ReplayKind::sodacer: return "sodacer";
        case ReplayKind::rer: return "rer";
        case ReplayKind::cber: return "cber";
    }
    return "unknown";
}

ReplayKind replay_kind_from_string(const std::string& name) {
    if (name == "sodacer") return ReplayKind::sodacer;
    if (name == "rer") return ReplayKind::rer;
    if (name == "cber") return ReplayKind::cber;
    throw ConfigError("unknown replay kind '" + name + "' (expected sodacer|rer|cber)");
}

RunResult train_episode(const TrainerConfig& cfg, const CostConfig& cost_cfg,
                        const ReplayConfig& replay_cfg, const OptimizerState& opt0,
                        const HpvParameters& params, const SystemState& x0,
                        const std::array<bool, 5>& mask) {
    RunResult result;
    result.run_id = cfg.run_id;

    BarrierSet barriers = default_hpv_barriers(params);
    barriers.gamma0 = cfg.gamma0;

    Rng batch_rng(derive_seed(cfg.seed, {kStreamBatch}));

    CriticWeights weights;
    if (cfg.w0 == WeightInit::uniform) {
        Rng init_rng(derive_seed(cfg.seed, {kStreamInit}));
        for (int k = 0; k < kFeatureCount; ++k)
            weights.w[k] = init_rng.uniform(-cfg.w0_range, cfg.w0_range);
    }
    OptimizerState opt = opt0;

    FastBuffer fast;
    SlowBuffer slow;
    RerBuffer rer(replay_cfg.rer_capacity);
    const std::size_t rer_batch_size =
        static_cast<std::size_t>(replay_cfg.fast_capacity + replay_cfg.batch_extra);

    const long n_steps = std::lround(cfg.horizon / cfg.dt);
    SystemState x = x0;
    double objective = 0.0;
    double spread = 0.0;

    auto record_point = [&](double t) {
        TrajectoryPoint pt;
        pt.t = t;
        pt.state = x;
        const Vec5 e = tracking_error(x, cost_cfg);
        Vec5 raw = control_law(x, weights, cost_cfg, params);
        for (int i = 0; i < 5; ++i)
            if (!mask[i]) raw[i] = 0.0;
        const FilterResult filtered = safety_filter(x, raw, barriers, params);
        pt.u_raw = raw;
        pt.u_filtered = filtered.u.as_array();
        pt.value = value(e, weights);
        pt.objective = objective;
        result.trajectory.push_back(pt);
        return filtered;
    };

    auto snapshot = [&](double t) {
        if (cfg.replay_kind == ReplayKind::rer) return;
        result.buffer_trace.push_back({t, slow.clusters()});
    };

    for (long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * cfg.dt;
        try {
            const FilterResult filtered = record_point(t);
            if (filtered.intervened) {
                ++result.diagnostics.safety_interventions;
                if (filtered.budget_cutoff) ++result.diagnostics.budget_cutoffs;
                result.safety_events.push_back({t, filtered.barriers_hit,
                                                result.trajectory.back().u_raw,
                                                filtered.u.as_array()});
            }
            const ControlVector u = filtered.u;

            // cost bookkeeping under zero-order hold, trapezoidal in time
            const double effort = control_effort_cost(u.as_array(), cost_cfg);
            const double l_left = state_cost(tracking_error(x, cost_cfg), cost_cfg) + effort;
            const double burden_left = infection_burden(x);

            const StepResult stepped = integrate_step(x, u, params, cfg.dt);
            result.diagnostics.clamp_events += stepped.clamp_events;

            const double l_right =
                state_cost(tracking_error(stepped.state, cost_cfg), cost_cfg) + effort;
            objective += 0.5 * cfg.dt *
                         (std::exp(-cost_cfg.nu * t) * l_left +
                          std::exp(-cost_cfg.nu * (t + cfg.dt)) * l_right);
            spread += 0.5 * cfg.dt * (burden_left + infection_burden(stepped.state));

            Sample sample{x.compartments(), u.as_array(), t, cfg.run_id};
            ++result.diagnostics.samples_generated;

            std::vector<Sample> batch;
            switch (cfg.replay_kind) {
                case ReplayKind::sodacer: {
                    fast.push(sample);
                    if (fast.size() > static_cast<std::size_t>(replay_cfg.fast_capacity))
                        slow.absorb(fast.pop_oldest(), replay_cfg);
                    if (replay_cfg.forget_every > 0 && (step + 1) % replay_cfg.forget_every == 0 &&
                        !slow.empty())
                        slow.apply_forgetting(replay_cfg);
                    slow.prune_narrow(replay_cfg);
                    slow.merge_similar(replay_cfg);
                    batch = make_minibatch(fast, slow, replay_cfg, cost_cfg.kappa, batch_rng);
                    break;
                }
                case ReplayKind::cber: {
                    fast.push(sample);
                    if (fast.size() > static_cast<std::size_t>(replay_cfg.fast_capacity))
                        slow.cber_absorb(fast.pop_oldest(), replay_cfg);
                    batch = make_minibatch(fast, slow, replay_cfg, cost_cfg.kappa, batch_rng);
                    break;
                }
                case ReplayKind::rer: {
                    rer.push(sample);
                    batch = rer.sample(rer_batch_size, batch_rng);
                    break;
                }
            }

            const FeatureVec phi_here = features(tracking_error(x, cost_cfg));
            for (int iter = 0; iter < cfg.max_inner_iters; ++iter) {
                const BatchGradient bg = batch_gradient(batch, weights, cost_cfg, params);
                const UpdateResult updated = update(opt, weights, bg.grad);
                double gate_phi = 0.0;
                double max_dw = 0.0;
                double dw_sq = 0.0;
                for (int k = 0; k < kFeatureCount; ++k) {
                    const double dw = std::abs(updated.weights.w[k] - weights.w[k]);
                    gate_phi += phi_here[k] * dw;
                    dw_sq += dw * dw;
                    if (dw > max_dw) max_dw = dw;
                }
                opt = updated.state;
                weights = updated.weights;
                ++result.diagnostics.inner_iters;
                if (cfg.log_optimizer) {
                    double grad_sq = 0.0;
                    for (int k = 0; k < kFeatureCount; ++k) grad_sq += bg.grad[k] * bg.grad[k];
                    result.optimizer_trace.push_back({static_cast<double>(opt.step),
                                                      std::sqrt(grad_sq), std::sqrt(dw_sq)});
                }
                // convergence gate, strengthened with a plain sup-norm check
                // because phi vanishes at the reference point
                if (gate_phi <= cfg.delta && max_dw <= cfg.delta) break;
            }

            if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) snapshot(t);
            x = stepped.state;
        } catch (const NonFiniteState& e) {
            throw NonFiniteState("outer step " + std::to_string(step) + ": " + e.what());
        } catch (const SaturationBoundary& e) {
            throw SaturationBoundary("outer step " + std::to_string(step) + ": " + e.what());
        } catch (const ClusterCapacityExceeded& e) {
            throw ClusterCapacityExceeded("outer step " + std::to_string(step) + ": " + e.what());
        } catch (const EmptyReplay& e) {
            throw EmptyReplay("outer step " + std::to_string(step) + ": " + e.what());
        } catch (const NonFiniteUpdate& e) {
            throw NonFiniteUpdate("outer step " + std::to_string(step) + ": " + e.what());
        }
        ++result.diagnostics.outer_steps;
    }

    record_point(static_cast<double>(n_steps) * cfg.dt);
    snapshot(static_cast<double>(n_steps) * cfg.dt);

    result.final_weights = weights;
    result.objective = objective;
    result.objective_spread = spread;
    result.diagnostics.pruned_mass = slow.pruned_mass();
    result.diagnostics.fast_size = static_cast<long>(fast.size());
    result.diagnostics.slow_mass = slow.total_count();
    result.diagnostics.cluster_count = static_cast<long>(slow.size());
    return result;
}

RunResult rollout_constant(const ControlVector& controls, const HpvParameters& params,
                           const SystemState& x0, double horizon, double dt,
                           const CostConfig& cost_cfg) {
    RunResult result;
    const long n_steps = horizon > 0.0 ? std::lround(horizon / dt) : 0;
    SystemState x = x0;
    double objective = 0.0;
    double spread = 0.0;
    const double effort = control_effort_cost(controls.as_array(), cost_cfg);

    for (long step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        TrajectoryPoint pt;
        pt.t = t;
        pt.state = x;
        pt.u_raw = controls.as_array();
        pt.u_filtered = controls.as_array();
        pt.value = 0.0;
        pt.objective = objective;
        result.trajectory.push_back(pt);
        if (step == n_steps) break;

        const double l_left = state_cost(tracking_error(x, cost_cfg), cost_cfg) + effort;
        const double burden_left = infection_burden(x);
        const StepResult stepped = integrate_step(x, controls, params, dt);
        result.diagnostics.clamp_events += stepped.clamp_events;
        objective += 0.5 * dt *
                     (std::exp(-cost_cfg.nu * t) * l_left +
                      std::exp(-cost_cfg.nu * (t + dt)) *
                          (state_cost(tracking_error(stepped.state, cost_cfg), cost_cfg) + effort));
        spread += 0.5 * dt * (burden_left + infection_burden(stepped.state));
        x = stepped.state;
        ++result.diagnostics.outer_steps;
    }

    result.objective = objective;
    result.objective_spread = spread;
    return result;
}

}  // namespace sodacer
