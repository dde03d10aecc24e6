#include "sodacer/io.hpp"

#include <cstdio>
#include <fstream>

#include "sodacer/errors.hpp"
#include "sodacer/version.hpp"

namespace sodacer::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path.string() + "'");
    return out;
}

json vec_json(const Vec5& v) { return json{v[0], v[1], v[2], v[3], v[4]}; }

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    open_out(path) << content;
}

void write_trajectory_csv(const std::filesystem::path& path, const RunResult& run) {
    std::ofstream out = open_out(path);
    out << "t,u_f,i_f,v_f,i_m,v_m,j_cost,"
           "raw_w1,raw_w2,raw_u1,raw_u2,raw_alpha,"
           "w1,w2,u1,u2,alpha,value\n";
    for (const TrajectoryPoint& pt : run.trajectory) {
        out << format_double(pt.t);
        for (double x : pt.state.compartments()) out << ',' << format_double(x);
        out << ',' << format_double(pt.state.j_cost);
        for (double u : pt.u_raw) out << ',' << format_double(u);
        for (double u : pt.u_filtered) out << ',' << format_double(u);
        out << ',' << format_double(pt.value) << '\n';
    }
}

void write_safety_log_csv(const std::filesystem::path& path, const RunResult& run,
                          const BarrierSet& barriers) {
    std::ofstream out = open_out(path);
    out << "t,barrier,raw_w1,raw_w2,raw_u1,raw_u2,raw_alpha,w1,w2,u1,u2,alpha\n";
    for (const SafetyEvent& ev : run.safety_events) {
        std::vector<std::string> names;
        if (ev.barriers.empty()) names.push_back("budget");
        for (int b : ev.barriers)
            names.push_back(barriers.barriers[static_cast<std::size_t>(b)].name);
        for (const std::string& name : names) {
            out << format_double(ev.t) << ',' << name;
            for (double u : ev.u_raw) out << ',' << format_double(u);
            for (double u : ev.u_filtered) out << ',' << format_double(u);
            out << '\n';
        }
    }
}

void write_optimizer_trace_csv(const std::filesystem::path& path, const RunResult& run) {
    std::ofstream out = open_out(path);
    out << "step,grad_norm,dw_norm\n";
    for (const auto& row : run.optimizer_trace)
        out << format_double(row[0]) << ',' << format_double(row[1]) << ','
            << format_double(row[2]) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSummary& summary) {
    std::ofstream out = open_out(path);
    out << "t";
    for (const char* name : kSeriesNames)
        out << ',' << name << "_min," << name << "_mean," << name << "_max";
    out << '\n';
    for (std::size_t i = 0; i < summary.time.size(); ++i) {
        out << format_double(summary.time[i]);
        for (const SpectrumSeries& s : summary.series)
            out << ',' << format_double(s.min[i]) << ',' << format_double(s.mean[i]) << ','
                << format_double(s.max[i]);
        out << '\n';
    }
}

void write_friedman_csv(const std::filesystem::path& path, const ComparisonReport& report) {
    std::ofstream out = open_out(path);
    out << "objective";
    for (ReplayKind m : report.methods) out << ',' << to_string(m);
    out << '\n';
    for (std::size_t row = 0; row < report.scenario_ids.size(); ++row) {
        out << report.scenario_ids[row];
        for (double v : report.mean_matrix[row]) out << ',' << format_double(v);
        out << '\n';
    }
    out << "friedman_rank";
    for (double r : report.friedman.average_rank) out << ',' << format_double(r);
    out << '\n';
}

void write_mean_cost_csv(const std::filesystem::path& path, const ComparisonReport& report,
                         std::size_t scenario_index) {
    std::ofstream out = open_out(path);
    const auto& cells = report.cells[scenario_index];
    out << "t";
    for (const ComparisonCell& cell : cells) out << ',' << to_string(cell.method);
    out << '\n';
    if (cells.empty()) return;
    constexpr int kObjectiveSeries = 6;
    const std::size_t n = cells.front().spectrum.time.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << format_double(cells.front().spectrum.time[i]);
        for (const ComparisonCell& cell : cells)
            out << ',' << format_double(cell.spectrum.series[kObjectiveSeries].mean[i]);
        out << '\n';
    }
}

nlohmann::json run_summary_json(const RunResult& run) {
    json snapshots = json::array();
    for (const ClusterSnapshot& snap : run.buffer_trace) {
        json clusters = json::array();
        for (const Cluster& c : snap.clusters) {
            json center = json::array();
            for (double v : c.center) center.push_back(v);
            clusters.push_back(
                {{"center", center}, {"sigma", c.sigma}, {"count", c.count}, {"id", c.id}});
        }
        snapshots.push_back({{"t", snap.t}, {"clusters", clusters}});
    }

    json weights = json::array();
    for (double w : run.final_weights.w) weights.push_back(w);

    return json{
        {"run_id", run.run_id},
        {"objective", run.objective},
        {"objective_spread", run.objective_spread},
        {"final_weights", weights},
        {"diagnostics",
         {{"clamp_events", run.diagnostics.clamp_events},
          {"safety_interventions", run.diagnostics.safety_interventions},
          {"budget_cutoffs", run.diagnostics.budget_cutoffs},
          {"inner_iters", run.diagnostics.inner_iters},
          {"outer_steps", run.diagnostics.outer_steps},
          {"samples_generated", run.diagnostics.samples_generated},
          {"pruned_mass", run.diagnostics.pruned_mass},
          {"fast_size", run.diagnostics.fast_size},
          {"slow_mass", run.diagnostics.slow_mass},
          {"cluster_count", run.diagnostics.cluster_count}}},
        {"buffer_trace", snapshots},
    };
}

nlohmann::json comparison_json(const ComparisonReport& report) {
    json methods = json::array();
    for (ReplayKind m : report.methods) methods.push_back(to_string(m));

    json cells = json::array();
    for (const auto& row : report.cells) {
        for (const ComparisonCell& cell : row) {
            json failures = json::array();
            for (const auto& [run, message] : cell.spectrum.failures)
                failures.push_back({{"run", run}, {"error", message}});
            cells.push_back({{"scenario", cell.scenario_id},
                             {"method", to_string(cell.method)},
                             {"mean_objective", cell.mean_objective},
                             {"stddev_objective", cell.stddev_objective},
                             {"objectives", cell.spectrum.final_objectives},
                             {"failures", failures}});
        }
    }

    json ranks = json::array();
    for (const auto& row : report.friedman.ranks) ranks.push_back(row);

    return json{{"note", report.note},
                {"scenarios", report.scenario_ids},
                {"methods", methods},
                {"mean_objective_matrix", report.mean_matrix},
                {"friedman_ranks", ranks},
                {"friedman_average_rank", report.friedman.average_rank},
                {"degenerate_rows", report.friedman.degenerate_rows},
                {"cells", cells}};
}

nlohmann::json config_echo(const AppConfig& cfg) {
    const HpvParameters& p = cfg.settings.params;
    const CostConfig& c = cfg.settings.cost;
    const ReplayConfig& r = cfg.settings.replay;
    const OptimizerState& o = cfg.settings.optimizer;
    const TrainerConfig& t = cfg.settings.trainer;
    const ExperimentConfig& e = cfg.experiments;
    const SimulateConfig& s = cfg.simulate;

    return json{
        {"dynamics",
         {{"epsilon", p.epsilon},
          {"theta", p.theta},
          {"beta_m", p.beta_m},
          {"beta_f", p.beta_f},
          {"beta_f_tilde", p.beta_f_tilde},
          {"gamma_f", p.gamma_f},
          {"gamma_m", p.gamma_m},
          {"p", p.p},
          {"mu_f", p.mu_f},
          {"mu_m", p.mu_m},
          {"a1_over_a0", p.a1_over_a0},
          {"a2_over_a0", p.a2_over_a0},
          {"a3_over_a0", p.a3_over_a0},
          {"u_max", p.u_max},
          {"alpha_max", p.alpha_max},
          {"j_max", p.j_max}}},
        {"cost",
         {{"q_diag", vec_json(c.q_diag)},
          {"nu", c.nu},
          {"phi_gain", vec_json(c.phi_gain)},
          {"kappa", vec_json(c.kappa)},
          {"x_ref", vec_json(c.x_ref)}}},
        {"replay",
         {{"fast_capacity", r.fast_capacity},
          {"gamma_th", r.gamma_th},
          {"sigma0", r.sigma0},
          {"beta", r.beta},
          {"rho", r.rho},
          {"sigma_th", r.sigma_th},
          {"gamma_merge", r.gamma_merge},
          {"forget_every", r.forget_every},
          {"batch_extra", r.batch_extra},
          {"max_clusters", r.max_clusters},
          {"rer_capacity", r.rer_capacity}}},
        {"optimizer",
         {{"beta1", o.beta1},
          {"beta2", o.beta2},
          {"eta", o.eta},
          {"eps0", o.eps0},
          {"squared_second_moment", o.squared_second_moment}}},
        {"safety", {{"gamma0", t.gamma0}}},
        {"trainer",
         {{"delta", t.delta},
          {"max_inner_iters", t.max_inner_iters},
          {"horizon", t.horizon},
          {"dt", t.dt},
          {"replay_kind", to_string(t.replay_kind)},
          {"w0", t.w0 == WeightInit::zeros ? "zeros" : "uniform"},
          {"w0_range", t.w0_range},
          {"snapshot_every", t.snapshot_every},
          {"seed", cfg.settings.base_seed}}},
        {"experiments",
         {{"runs", e.runs},
          {"full_runs", e.full_runs},
          {"horizon", e.horizon},
          {"full_horizon", e.full_horizon},
          {"dt", e.dt},
          {"x0_inf_max", e.x0.inf_max},
          {"x0_vac_max", e.x0.vac_max}}},
        {"simulate",
         {{"controls", vec_json(s.controls)},
          {"x0", vec_json(s.x0.compartments())},
          {"horizon", s.horizon},
          {"dt", s.dt}}},
    };
}

nlohmann::json manifest_json(const AppConfig& cfg, const std::string& command,
                             const std::vector<std::string>& scenario_ids, int runs,
                             double wall_clock_seconds) {
    json seeds = json::object();
    for (const std::string& id : scenario_ids) {
        json per_run = json::array();
        for (int r = 0; r < runs; ++r)
            per_run.push_back({{"run", r},
                               {"x0_seed", x0_seed(cfg.settings.base_seed, id, r)},
                               {"episode_seed", episode_seed(cfg.settings.base_seed, id, r)}});
        seeds[id] = per_run;
    }
    return json{{"artifact_version", kVersion},
                {"command", command},
                {"seed", cfg.settings.base_seed},
                {"seeds", seeds},
                {"config", config_echo(cfg)},
                {"wall_clock_seconds", wall_clock_seconds}};
}

}  // namespace sodacer::io
