#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sodacer/config.hpp"
#include "sodacer/errors.hpp"
#include "sodacer/io.hpp"
#include "sodacer/version.hpp"

namespace fs = std::filesystem;
using namespace sodacer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "runs";
    bool force = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key-value config file");
    cmd->add_option("--set", opts.overrides, "override as section.key=value")
        ->take_all()
        ->expected(-1);
    cmd->add_option("--out", opts.out_dir, "output directory")
        ->envname("SODACER_OUT_DIR");
    cmd->add_flag("--force", opts.force, "overwrite an existing run manifest");
}

AppConfig load(const CommonOpts& opts) {
    std::optional<std::string> file;
    if (!opts.config_path.empty()) file = opts.config_path;
    return load_app_config(file, opts.overrides);
}

fs::path prepare_out_dir(const CommonOpts& opts) {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    if (fs::exists(dir / "manifest.json") && !opts.force)
        throw ConfigError("output directory '" + dir.string() +
                          "' already holds a run manifest; pass --force to overwrite");
    return dir;
}

std::string join_command(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

class WallClock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_failures(const SpectrumSummary& summary, const std::string& label) {
    for (const auto& [run, message] : summary.failures)
        std::cerr << "[failed] " << label << " run " << run << ": " << message << "\n";
}

int run_simulate(const CommonOpts& opts, const std::string& command) {
    const WallClock clock;
    const AppConfig cfg = load(opts);
    const fs::path dir = prepare_out_dir(opts);

    const SimulateConfig& sim = cfg.simulate;
    const RunResult run =
        rollout_constant(ControlVector::from_array(sim.controls), cfg.settings.params, sim.x0,
                         sim.horizon, sim.dt, cfg.settings.cost);

    io::write_trajectory_csv(dir / "trajectory.csv", run);
    io::write_text(dir / "summary.json", io::run_summary_json(run).dump(2) + "\n");
    io::write_text(dir / "manifest.json",
                   io::manifest_json(cfg, command, {}, 0, clock.seconds()).dump(2) + "\n");
    std::cout << "simulate: " << run.trajectory.size() << " points, objective "
              << io::format_double(run.objective) << "\n";
    return kExitOk;
}

int run_train(const CommonOpts& opts, const std::string& scenario_id, bool log_safety,
              bool log_optimizer, const std::string& command) {
    const WallClock clock;
    const AppConfig cfg = load(opts);
    const fs::path dir = prepare_out_dir(opts);

    const ScenarioConfig sc = scenario_by_id(scenario_id);
    TrainerConfig tc = cfg.settings.trainer;
    tc.seed = episode_seed(cfg.settings.base_seed, sc.id, 0);
    tc.log_optimizer = log_optimizer;
    tc.run_id = 0;

    Rng x0_rng(x0_seed(cfg.settings.base_seed, sc.id, 0));
    X0Sampler sampler = cfg.experiments.x0;
    const SystemState x0 = sampler.draw(x0_rng);

    const RunResult run = train_episode(tc, cfg.settings.cost, cfg.settings.replay,
                                        cfg.settings.optimizer, cfg.settings.params, x0, sc.mask);

    io::write_trajectory_csv(dir / "trajectory.csv", run);
    io::write_text(dir / "summary.json", io::run_summary_json(run).dump(2) + "\n");
    if (log_safety) {
        BarrierSet barriers = default_hpv_barriers(cfg.settings.params);
        io::write_safety_log_csv(dir / "safety_log.csv", run, barriers);
    }
    if (log_optimizer) io::write_optimizer_trace_csv(dir / "optimizer_trace.csv", run);
    io::write_text(dir / "manifest.json",
                   io::manifest_json(cfg, command, {sc.id}, 1, clock.seconds()).dump(2) + "\n");
    std::cout << "train[" << to_string(tc.replay_kind) << ", " << sc.id << "]: objective "
              << io::format_double(run.objective) << ", safety interventions "
              << run.diagnostics.safety_interventions << ", clamp events "
              << run.diagnostics.clamp_events << "\n";
    return kExitOk;
}

int run_spectrum(const CommonOpts& opts, const std::string& scenario_id,
                 const std::string& method_name, bool full, const std::string& command) {
    const WallClock clock;
    const AppConfig cfg = load(opts);
    const fs::path dir = prepare_out_dir(opts);

    ScenarioConfig sc = scenario_by_id(scenario_id);
    sc.runs = full ? cfg.experiments.full_runs : cfg.experiments.runs;
    sc.horizon = full ? cfg.experiments.full_horizon : cfg.experiments.horizon;
    sc.dt = cfg.experiments.dt;
    sc.x0 = cfg.experiments.x0;

    const ReplayKind method = replay_kind_from_string(method_name);
    const SpectrumSummary summary = run_scenario(sc, method, cfg.settings);
    print_failures(summary, sc.id + "/" + method_name);

    io::write_spectrum_csv(dir / ("spectrum_" + sc.id + "_" + method_name + ".csv"), summary);
    nlohmann::json summary_json{{"scenario", sc.id},
                                {"method", method_name},
                                {"runs", summary.runs_attempted},
                                {"final_objectives", summary.final_objectives},
                                {"failures", summary.failures.size()}};
    io::write_text(dir / "summary.json", summary_json.dump(2) + "\n");
    io::write_text(dir / "manifest.json",
                   io::manifest_json(cfg, command, {sc.id}, sc.runs, clock.seconds()).dump(2) +
                       "\n");
    std::cout << "spectrum[" << sc.id << ", " << method_name << "]: " << sc.runs << " runs, "
              << summary.failures.size() << " failed\n";
    return summary.failures.empty() ? kExitOk : kExitPartial;
}

int run_compare(const CommonOpts& opts, std::string scenarios_arg, std::string methods_arg,
                int runs_override, bool full, const std::string& command) {
    const WallClock clock;
    const AppConfig cfg = load(opts);
    const fs::path dir = prepare_out_dir(opts);

    if (scenarios_arg == "all" || scenarios_arg == "f1..f5") scenarios_arg = "f1,f2,f3,f4,f5";

    std::vector<ScenarioConfig> scenarios;
    std::vector<std::string> ids;
    {
        std::istringstream in(scenarios_arg);
        std::string id;
        while (std::getline(in, id, ',')) {
            ScenarioConfig sc = scenario_by_id(id);
            sc.runs = runs_override > 0 ? runs_override
                                        : (full ? cfg.experiments.full_runs : cfg.experiments.runs);
            sc.horizon = full ? cfg.experiments.full_horizon : cfg.experiments.horizon;
            sc.dt = cfg.experiments.dt;
            sc.x0 = cfg.experiments.x0;
            ids.push_back(sc.id);
            scenarios.push_back(std::move(sc));
        }
    }
    std::vector<ReplayKind> methods;
    {
        std::istringstream in(methods_arg);
        std::string name;
        while (std::getline(in, name, ',')) methods.push_back(replay_kind_from_string(name));
    }
    if (scenarios.empty() || methods.empty())
        throw ConfigError("compare needs at least one scenario and one method");

    const ComparisonReport report = compare_methods(scenarios, methods, cfg.settings);

    std::size_t failures = 0;
    for (std::size_t si = 0; si < report.cells.size(); ++si)
        for (const ComparisonCell& cell : report.cells[si]) {
            print_failures(cell.spectrum, cell.scenario_id + "/" + to_string(cell.method));
            failures += cell.spectrum.failures.size();
            io::write_spectrum_csv(
                dir / ("spectrum_" + cell.scenario_id + "_" + to_string(cell.method) + ".csv"),
                cell.spectrum);
        }
    for (std::size_t si = 0; si < report.scenario_ids.size(); ++si)
        io::write_mean_cost_csv(dir / ("mean_cost_" + report.scenario_ids[si] + ".csv"), report,
                                si);
    io::write_friedman_csv(dir / "friedman.csv", report);
    io::write_text(dir / "comparison.json", io::comparison_json(report).dump(2) + "\n");
    io::write_text(dir / "manifest.json",
                   io::manifest_json(cfg, command, ids, scenarios.front().runs, clock.seconds())
                           .dump(2) +
                       "\n");

    std::cout << "compare: scenarios " << scenarios_arg << ", methods " << methods_arg << "\n";
    for (std::size_t m = 0; m < methods.size(); ++m)
        std::cout << "  rank[" << to_string(methods[m])
                  << "] = " << io::format_double(report.friedman.average_rank[m]) << "\n";
    return failures == 0 ? kExitOk : kExitPartial;
}

int run_validate(const CommonOpts& opts) {
    load(opts);  // parse + invariant checks
    std::cout << "config ok\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"safe learning-based control of the HPV intervention model"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::uint64_t seed = 0;

    auto* simulate = app.add_subcommand("simulate", "open-loop rollout under fixed controls");
    add_common(simulate, opts);
    std::string controls_arg;
    std::string x0_arg;
    double sim_horizon = -1.0;
    simulate->add_option("--controls", controls_arg, "w1,w2,u1,u2,alpha (constant)");
    simulate->add_option("--x0", x0_arg, "initial state u_f,i_f,v_f,i_m,v_m");
    simulate->add_option("--horizon", sim_horizon, "years");

    auto* train = app.add_subcommand("train", "single closed-loop training run");
    add_common(train, opts);
    std::string train_scenario = "f5";
    bool log_safety = false;
    bool log_optimizer = false;
    train->add_option("--scenario", train_scenario, "control scenario f1..f5");
    train->add_option("--seed", seed, "base seed");
    train->add_flag("--log-safety", log_safety, "write safety_log.csv");
    train->add_flag("--log-optimizer", log_optimizer, "write optimizer_trace.csv");

    auto* spectrum = app.add_subcommand("spectrum", "seeded batch of runs for one scenario");
    add_common(spectrum, opts);
    std::string spec_scenario = "f5";
    std::string spec_method = "sodacer";
    int spec_runs = 0;
    bool full = false;
    spectrum->add_option("--scenario", spec_scenario, "control scenario f1..f5");
    spectrum->add_option("--method", spec_method, "sodacer|rer|cber");
    spectrum->add_option("--runs", spec_runs, "override run count");
    spectrum->add_option("--seed", seed, "base seed");
    spectrum->add_flag("--full", full, "full-scale batch (200 runs, long horizon)");

    auto* compare = app.add_subcommand("compare", "replay methods across scenarios");
    add_common(compare, opts);
    std::string cmp_scenarios = "f1..f5";
    std::string cmp_methods = "rer,cber,sodacer";
    int cmp_runs = 0;
    compare->add_option("--scenarios", cmp_scenarios, "comma list or f1..f5");
    compare->add_option("--methods", cmp_methods, "comma list of sodacer|rer|cber");
    compare->add_option("--runs", cmp_runs, "override run count");
    compare->add_option("--seed", seed, "base seed");
    compare->add_flag("--full", full, "full-scale batches");

    auto* validate_cmd = app.add_subcommand("validate-config", "check a config without running");
    add_common(validate_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    // dedicated flags beat --set overrides, which beat the file
    if (simulate->parsed()) {
        if (simulate->count("--controls")) opts.overrides.push_back("simulate.controls=" + controls_arg);
        if (simulate->count("--x0")) opts.overrides.push_back("simulate.x0=" + x0_arg);
        if (simulate->count("--horizon"))
            opts.overrides.push_back("simulate.horizon=" + io::format_double(sim_horizon));
    }
    for (CLI::App* sub : {train, spectrum, compare})
        if (sub->parsed() && sub->count("--seed"))
            opts.overrides.push_back("trainer.seed=" + std::to_string(seed));
    if (spectrum->parsed() && spec_runs > 0)
        opts.overrides.push_back("experiments.runs=" + std::to_string(spec_runs));

    const std::string command = join_command(argc, argv);
    try {
        if (simulate->parsed()) return run_simulate(opts, command);
        if (train->parsed())
            return run_train(opts, train_scenario, log_safety, log_optimizer, command);
        if (spectrum->parsed())
            return run_spectrum(opts, spec_scenario, spec_method, full, command);
        if (compare->parsed())
            return run_compare(opts, cmp_scenarios, cmp_methods, cmp_runs, full, command);
        if (validate_cmd->parsed()) return run_validate(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
