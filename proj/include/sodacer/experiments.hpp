#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sodacer/trainer.hpp"

namespace sodacer {

// Everything a single training run needs, minus the scenario specifics.
struct RunSettings {
    TrainerConfig trainer;
    CostConfig cost;
    ReplayConfig replay;
    OptimizerState optimizer;
    HpvParameters params;
    std::uint64_t base_seed = 0;
};

// Initial-condition distribution: uniform infections up to inf_max,
// uniform vaccination coverage up to vac_max, rejection-sampled onto the
// population simplexes.
struct X0Sampler {
    double inf_max = 0.2;
    double vac_max = 0.5;

    SystemState draw(Rng& rng) const;
};

struct ScenarioConfig {
    std::string id;
    std::array<bool, 5> mask{};  // (w1, w2, u1, u2, alpha)
    int runs = 20;
    double horizon = 10.0;
    double dt = 0.01;
    X0Sampler x0;
};

// The five standard control scenarios f1..f5.
ScenarioConfig scenario_by_id(const std::string& id);
std::vector<std::string> standard_scenario_ids();

enum class ExecPolicy { serial, parallel };

inline constexpr int kSeriesCount = 12;
// u_f, i_f, v_f, i_m, v_m, j_cost, objective, w1, w2, u1, u2, alpha
extern const std::array<const char*, kSeriesCount> kSeriesNames;

struct SpectrumSeries {
    std::vector<double> min, mean, max;
};

struct SpectrumSummary {
    std::vector<double> time;
    std::array<SpectrumSeries, kSeriesCount> series;
    std::vector<double> final_objectives;                 // per successful run
    std::vector<std::pair<int, std::string>> failures;    // (run index, message)
    int runs_attempted = 0;
};

// Deterministic per-run stream seeds; method-independent so methods are
// seed-paired.
std::uint64_t x0_seed(std::uint64_t base, const std::string& scenario_id, int run);
std::uint64_t episode_seed(std::uint64_t base, const std::string& scenario_id, int run);

// Executes `runs` independent training episodes and aggregates the
// min/mean/max envelope of every series. Per-run failures are collected,
// not fatal. Aggregation order is fixed, so serial and parallel execution
// produce identical summaries.
SpectrumSummary run_scenario(const ScenarioConfig& sc, ReplayKind method,
                             const RunSettings& settings, ExecPolicy policy = ExecPolicy::parallel);

struct FriedmanResult {
    std::vector<std::vector<double>> ranks;  // [scenario][method], 1 = best (smallest)
    std::vector<double> average_rank;        // per method
    std::vector<int> degenerate_rows;        // all-tied scenarios, reported not fatal
};

// Within-scenario average ranks (ties get the mean of the tied positions),
// averaged across scenarios per method.
FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& values);

struct ComparisonCell {
    std::string scenario_id;
    ReplayKind method = ReplayKind::sodacer;
    SpectrumSummary spectrum;
    double mean_objective = 0.0;
    double stddev_objective = 0.0;
};

struct ComparisonReport {
    std::vector<std::string> scenario_ids;
    std::vector<ReplayKind> methods;
    std::vector<std::vector<double>> mean_matrix;  // [scenario][method]
    FriedmanResult friedman;
    std::vector<std::vector<ComparisonCell>> cells;  // [scenario][method]
    std::string note;
};

// Runs every (scenario, method) cell with paired seeds and ranks the methods
// by mean final objective.
ComparisonReport compare_methods(const std::vector<ScenarioConfig>& scenarios,
                                 const std::vector<ReplayKind>& methods,
                                 const RunSettings& settings,
                                 ExecPolicy policy = ExecPolicy::parallel);

}  // namespace sodacer
