#include "sodacer/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "sodacer/errors.hpp"

namespace sodacer {

namespace {

enum : std::uint64_t { kStreamX0 = 11, kStreamEpisode = 12 };

// FNV-1a, so scenario ids fold into seeds identically on every platform.
std::uint64_t hash_id(const std::string& id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::array<double, kSeriesCount> extract_series(const TrajectoryPoint& pt) {
    return {pt.state.u_f,      pt.state.i_f,      pt.state.v_f,      pt.state.i_m,
            pt.state.v_m,      pt.state.j_cost,   pt.objective,      pt.u_filtered[0],
            pt.u_filtered[1],  pt.u_filtered[2],  pt.u_filtered[3],  pt.u_filtered[4]};
}

}  // namespace

const std::array<const char*, kSeriesCount> kSeriesNames = {
    "u_f", "i_f", "v_f", "i_m", "v_m", "j_cost", "objective",
    "w1",  "w2",  "u1",  "u2",  "alpha"};

SystemState X0Sampler::draw(Rng& rng) const {
    for (;;) {
        SystemState x;
        x.u_f = rng.uniform(0.0, inf_max);
        x.i_f = rng.uniform(0.0, inf_max);
        x.v_f = rng.uniform(0.0, vac_max);
        x.i_m = rng.uniform(0.0, inf_max);
        x.v_m = rng.uniform(0.0, vac_max);
        if (x.u_f + x.i_f + x.v_f <= 1.0 && x.i_m + x.v_m <= 1.0) return x;
    }
}

ScenarioConfig scenario_by_id(const std::string& id) {
    ScenarioConfig sc;
    sc.id = id;
    if (id == "f1")
        sc.mask = {true, true, false, false, false};
    else if (id == "f2")
        sc.mask = {false, false, true, true, true};
    else if (id == "f3")
        sc.mask = {false, false, true, true, false};
    else if (id == "f4")
        sc.mask = {false, false, false, false, true};
    else if (id == "f5")
        sc.mask = {true, true, true, true, true};
    else
        throw ConfigError("unknown scenario '" + id + "' (expected f1..f5)");
    return sc;
}

std::vector<std::string> standard_scenario_ids() { return {"f1", "f2", "f3", "f4", "f5"}; }

std::uint64_t x0_seed(std::uint64_t base, const std::string& scenario_id, int run) {
    return derive_seed(base, {hash_id(scenario_id), static_cast<std::uint64_t>(run), kStreamX0});
}

std::uint64_t episode_seed(std::uint64_t base, const std::string& scenario_id, int run) {
    return derive_seed(base,
                       {hash_id(scenario_id), static_cast<std::uint64_t>(run), kStreamEpisode});
}

SpectrumSummary run_scenario(const ScenarioConfig& sc, ReplayKind method,
                             const RunSettings& settings, ExecPolicy policy) {
    const int runs = sc.runs;
    std::vector<std::optional<RunResult>> results(static_cast<std::size_t>(runs));
    std::vector<std::string> errors(static_cast<std::size_t>(runs));
    const bool parallel = policy == ExecPolicy::parallel;

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (int r = 0; r < runs; ++r) {
        try {
            Rng x0_rng(x0_seed(settings.base_seed, sc.id, r));
            const SystemState x0 = sc.x0.draw(x0_rng);

            TrainerConfig tc = settings.trainer;
            tc.horizon = sc.horizon;
            tc.dt = sc.dt;
            tc.replay_kind = method;
            tc.seed = episode_seed(settings.base_seed, sc.id, r);
            tc.run_id = r;

            results[static_cast<std::size_t>(r)] = train_episode(
                tc, settings.cost, settings.replay, settings.optimizer, settings.params, x0,
                sc.mask);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(r)] = e.what();
        }
    }

    SpectrumSummary summary;
    summary.runs_attempted = runs;
    const std::size_t n_points = static_cast<std::size_t>(std::lround(sc.horizon / sc.dt)) + 1;
    summary.time.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) summary.time[i] = static_cast<double>(i) * sc.dt;
    for (auto& series : summary.series) {
        series.min.assign(n_points, std::numeric_limits<double>::infinity());
        series.mean.assign(n_points, 0.0);
        series.max.assign(n_points, -std::numeric_limits<double>::infinity());
    }

    int successes = 0;
    for (int r = 0; r < runs; ++r) {  // fixed order keeps the mean deterministic
        const auto& maybe = results[static_cast<std::size_t>(r)];
        if (!maybe) {
            summary.failures.emplace_back(r, errors[static_cast<std::size_t>(r)]);
            continue;
        }
        ++successes;
        const RunResult& run = *maybe;
        for (std::size_t i = 0; i < n_points; ++i) {
            const auto vals = extract_series(run.trajectory[i]);
            for (int s = 0; s < kSeriesCount; ++s) {
                auto& series = summary.series[static_cast<std::size_t>(s)];
                series.min[i] = std::min(series.min[i], vals[static_cast<std::size_t>(s)]);
                series.max[i] = std::max(series.max[i], vals[static_cast<std::size_t>(s)]);
                series.mean[i] += vals[static_cast<std::size_t>(s)];
            }
        }
        summary.final_objectives.push_back(run.objective);
    }
    if (successes > 0)
        for (auto& series : summary.series)
            for (double& m : series.mean) m /= static_cast<double>(successes);
    return summary;
}

FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& values) {
    FriedmanResult result;
    if (values.empty()) return result;
    const std::size_t n_methods = values.front().size();
    result.average_rank.assign(n_methods, 0.0);

    for (std::size_t row = 0; row < values.size(); ++row) {
        const std::vector<double>& vals = values[row];
        std::vector<std::size_t> order(n_methods);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

        std::vector<double> ranks(n_methods, 0.0);
        std::size_t i = 0;
        while (i < n_methods) {
            std::size_t j = i;
            while (j + 1 < n_methods && vals[order[j + 1]] == vals[order[i]]) ++j;
            // positions i..j (0-based) share the average of ranks i+1..j+1
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
            i = j + 1;
        }
        if (n_methods > 1 && vals.front() == vals.back() &&
            std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals.front(); }))
            result.degenerate_rows.push_back(static_cast<int>(row));

        for (std::size_t m = 0; m < n_methods; ++m) result.average_rank[m] += ranks[m];
        result.ranks.push_back(std::move(ranks));
    }
    for (double& r : result.average_rank) r /= static_cast<double>(values.size());
    return result;
}

ComparisonReport compare_methods(const std::vector<ScenarioConfig>& scenarios,
                                 const std::vector<ReplayKind>& methods,
                                 const RunSettings& settings, ExecPolicy policy) {
    ComparisonReport report;
    report.methods = methods;
    report.note =
        "Absolute objective values depend on this artifact's cost weights, horizon, and seeds; "
        "only the relative ordering of methods and the paired per-seed differences are "
        "meaningful.";

    for (const ScenarioConfig& sc : scenarios) {
        report.scenario_ids.push_back(sc.id);
        std::vector<ComparisonCell> row_cells;
        std::vector<double> row_means;
        for (ReplayKind method : methods) {
            ComparisonCell cell;
            cell.scenario_id = sc.id;
            cell.method = method;
            cell.spectrum = run_scenario(sc, method, settings, policy);

            const std::vector<double>& objectives = cell.spectrum.final_objectives;
            double mean = 0.0;
            for (double o : objectives) mean += o;
            if (!objectives.empty()) mean /= static_cast<double>(objectives.size());
            double var = 0.0;
            for (double o : objectives) var += (o - mean) * (o - mean);
            cell.mean_objective = mean;
            cell.stddev_objective =
                objectives.size() > 1 ? std::sqrt(var / static_cast<double>(objectives.size() - 1))
                                      : 0.0;
            row_means.push_back(mean);
            row_cells.push_back(std::move(cell));
        }
        report.mean_matrix.push_back(std::move(row_means));
        report.cells.push_back(std::move(row_cells));
    }
    report.friedman = friedman_ranks(report.mean_matrix);
    return report;
}

}  // namespace sodacer
