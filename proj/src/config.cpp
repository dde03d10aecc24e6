#include "sodacer/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sodacer/errors.hpp"

namespace sodacer {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
    }
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || section.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": key outside a [section] or empty key");
        map.values_[section + "." + key] = value;
    }
    return map;
}

void ConfigMap::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || assignment.find('.') == std::string::npos ||
        assignment.find('.') > eq)
        throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

void ConfigMap::set(const std::string& key, const std::string& value) { values_[key] = value; }

double ConfigMap::get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = parse_double(key, it->second);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + it->second +
                          "'");
    return i;
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + it->second +
                          "' as an unsigned integer");
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

Vec5 ConfigMap::get_vec5(const std::string& key, const Vec5& fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    Vec5 out{};
    std::istringstream in(it->second);
    std::string part;
    int i = 0;
    while (std::getline(in, part, ',')) {
        if (i >= 5) break;
        out[i++] = parse_double(key, trim(part));
    }
    if (i != 5)
        throw ConfigError("config key '" + key + "': expected 5 comma-separated numbers, got '" +
                          it->second + "'");
    return out;
}

std::vector<std::string> ConfigMap::unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (consumed_.count(key) == 0) out.push_back(key);
    return out;
}

namespace {

void read_params(const ConfigMap& c, HpvParameters& p) {
    p.epsilon = c.get_double("dynamics.epsilon", p.epsilon);
    p.theta = c.get_double("dynamics.theta", p.theta);
    p.beta_m = c.get_double("dynamics.beta_m", p.beta_m);
    p.beta_f = c.get_double("dynamics.beta_f", p.beta_f);
    p.beta_f_tilde = c.get_double("dynamics.beta_f_tilde", p.beta_f_tilde);
    p.gamma_f = c.get_double("dynamics.gamma_f", p.gamma_f);
    p.gamma_m = c.get_double("dynamics.gamma_m", p.gamma_m);
    p.p = c.get_double("dynamics.p", p.p);
    p.mu_f = c.get_double("dynamics.mu_f", p.mu_f);
    p.mu_m = c.get_double("dynamics.mu_m", p.mu_m);
    p.a1_over_a0 = c.get_double("dynamics.a1_over_a0", p.a1_over_a0);
    p.a2_over_a0 = c.get_double("dynamics.a2_over_a0", p.a2_over_a0);
    p.a3_over_a0 = c.get_double("dynamics.a3_over_a0", p.a3_over_a0);
    p.u_max = c.get_double("dynamics.u_max", p.u_max);
    p.alpha_max = c.get_double("dynamics.alpha_max", p.alpha_max);
    p.j_max = c.get_double("dynamics.j_max", p.j_max);
}

void read_cost(const ConfigMap& c, CostConfig& cost) {
    cost.q_diag = c.get_vec5("cost.q_diag", cost.q_diag);
    cost.nu = c.get_double("cost.nu", cost.nu);
    cost.phi_gain = c.get_vec5("cost.phi_gain", cost.phi_gain);
    cost.kappa = c.get_vec5("cost.kappa", cost.kappa);
    cost.x_ref = c.get_vec5("cost.x_ref", cost.x_ref);
}

void read_replay(const ConfigMap& c, ReplayConfig& r) {
    r.fast_capacity = c.get_int("replay.fast_capacity", r.fast_capacity);
    r.gamma_th = c.get_double("replay.gamma_th", r.gamma_th);
    r.sigma0 = c.get_double("replay.sigma0", r.sigma0);
    r.beta = c.get_double("replay.beta", r.beta);
    r.rho = c.get_double("replay.rho", r.rho);
    r.sigma_th = c.get_double("replay.sigma_th", r.sigma_th);
    r.gamma_merge = c.get_double("replay.gamma_merge", r.gamma_merge);
    r.forget_every = c.get_int("replay.forget_every", r.forget_every);
    r.batch_extra = c.get_int("replay.batch_extra", r.batch_extra);
    r.max_clusters = c.get_int("replay.max_clusters", r.max_clusters);
    r.rer_capacity = c.get_int("replay.rer_capacity", r.rer_capacity);
}

void read_optimizer(const ConfigMap& c, OptimizerState& o) {
    o.beta1 = c.get_double("optimizer.beta1", o.beta1);
    o.beta2 = c.get_double("optimizer.beta2", o.beta2);
    o.eta = c.get_double("optimizer.eta", o.eta);
    o.eps0 = c.get_double("optimizer.eps0", o.eps0);
    o.squared_second_moment =
        c.get_bool("optimizer.squared_second_moment", o.squared_second_moment);
}

void read_trainer(const ConfigMap& c, TrainerConfig& t, std::uint64_t& base_seed) {
    t.delta = c.get_double("trainer.delta", t.delta);
    t.max_inner_iters = c.get_int("trainer.max_inner_iters", t.max_inner_iters);
    t.horizon = c.get_double("trainer.horizon", t.horizon);
    t.dt = c.get_double("trainer.dt", t.dt);
    t.replay_kind = replay_kind_from_string(
        c.get_string("trainer.replay_kind", to_string(t.replay_kind)));
    const std::string w0 = c.get_string("trainer.w0", "zeros");
    if (w0 == "zeros")
        t.w0 = WeightInit::zeros;
    else if (w0 == "uniform")
        t.w0 = WeightInit::uniform;
    else
        throw ConfigError("trainer.w0 must be 'zeros' or 'uniform', got '" + w0 + "'");
    t.w0_range = c.get_double("trainer.w0_range", t.w0_range);
    t.snapshot_every = c.get_int("trainer.snapshot_every", t.snapshot_every);
    t.gamma0 = c.get_double("safety.gamma0", t.gamma0);
    base_seed = c.get_u64("trainer.seed", base_seed);
}

void read_experiments(const ConfigMap& c, ExperimentConfig& e) {
    e.runs = c.get_int("experiments.runs", e.runs);
    e.full_runs = c.get_int("experiments.full_runs", e.full_runs);
    e.horizon = c.get_double("experiments.horizon", e.horizon);
    e.full_horizon = c.get_double("experiments.full_horizon", e.full_horizon);
    e.dt = c.get_double("experiments.dt", e.dt);
    e.x0.inf_max = c.get_double("experiments.x0_inf_max", e.x0.inf_max);
    e.x0.vac_max = c.get_double("experiments.x0_vac_max", e.x0.vac_max);
}

void read_simulate(const ConfigMap& c, SimulateConfig& s) {
    s.controls = c.get_vec5("simulate.controls", s.controls);
    const Vec5 x0 = c.get_vec5(
        "simulate.x0", {s.x0.u_f, s.x0.i_f, s.x0.v_f, s.x0.i_m, s.x0.v_m});
    s.x0 = SystemState{x0[0], x0[1], x0[2], x0[3], x0[4], 0.0};
    s.horizon = c.get_double("simulate.horizon", s.horizon);
    s.dt = c.get_double("simulate.dt", s.dt);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("invalid configuration: " + message);
}

}  // namespace

AppConfig load_app_config(const std::optional<std::string>& file,
                          const std::vector<std::string>& overrides) {
    ConfigMap map = file ? ConfigMap::parse_file(*file) : ConfigMap{};
    for (const std::string& o : overrides) map.apply_override(o);

    AppConfig cfg;
    read_params(map, cfg.settings.params);
    read_cost(map, cfg.settings.cost);
    read_replay(map, cfg.settings.replay);
    read_optimizer(map, cfg.settings.optimizer);
    read_trainer(map, cfg.settings.trainer, cfg.settings.base_seed);
    read_experiments(map, cfg.experiments);
    read_simulate(map, cfg.simulate);

    const std::vector<std::string> unknown = map.unconsumed();
    if (!unknown.empty())
        throw ConfigError("unknown config key '" + unknown.front() + "'");

    validate(cfg);
    return cfg;
}

void validate(const AppConfig& cfg) {
    const HpvParameters& p = cfg.settings.params;
    for (double rate : {p.theta, p.beta_m, p.beta_f, p.beta_f_tilde, p.gamma_f, p.gamma_m, p.mu_f,
                        p.mu_m, p.u_max, p.alpha_max})
        require(rate > 0.0, "all model rates must be strictly positive");
    require(p.epsilon >= 0.0 && p.epsilon <= 0.2, "dynamics.epsilon must lie in [0, 0.2]");
    require(p.p >= 0.0 && p.p <= 1.0, "dynamics.p must lie in [0, 1]");
    require(p.j_max > 0.0, "dynamics.j_max must be positive");
    require(p.a1_over_a0 > 0.0 && p.a2_over_a0 > 0.0 && p.a3_over_a0 > 0.0,
            "cost weights a*_over_a0 must be positive");

    const CostConfig& c = cfg.settings.cost;
    bool any_q = false;
    for (double q : c.q_diag) {
        require(q >= 0.0, "cost.q_diag entries must be nonnegative");
        any_q = any_q || q > 0.0;
    }
    require(any_q, "cost.q_diag needs at least one positive entry");
    require(c.nu > 0.0, "cost.nu must be positive");
    for (double g : c.phi_gain) require(g > 0.0, "cost.phi_gain entries must be positive");
    for (double k : c.kappa) require(k > 0.0, "cost.kappa entries must be positive");

    const ReplayConfig& r = cfg.settings.replay;
    require(r.fast_capacity >= 1, "replay.fast_capacity must be at least 1");
    require(r.gamma_th > 0.0 && r.gamma_th < 1.0, "replay.gamma_th must lie in (0, 1)");
    require(r.sigma0 > 0.0, "replay.sigma0 must be positive");
    require(r.beta > 0.0, "replay.beta must be positive");
    require(r.rho > 0.0, "replay.rho must be positive");
    require(r.sigma_th > 0.0 && r.sigma_th < r.sigma0,
            "replay.sigma_th must lie in (0, sigma0)");
    require(r.gamma_merge > 0.0, "replay.gamma_merge must be positive");
    require(r.forget_every >= 1, "replay.forget_every must be at least 1");
    require(r.batch_extra >= 0, "replay.batch_extra must be nonnegative");
    require(r.max_clusters >= 1, "replay.max_clusters must be at least 1");
    require(r.rer_capacity >= 1, "replay.rer_capacity must be at least 1");

    const OptimizerState& o = cfg.settings.optimizer;
    require(o.beta1 > 0.0 && o.beta1 < 1.0, "optimizer.beta1 must lie in (0, 1)");
    require(o.beta2 > 0.0 && o.beta2 < 1.0, "optimizer.beta2 must lie in (0, 1)");
    require(o.eta > 0.0, "optimizer.eta must be positive");
    require(o.eps0 > 0.0, "optimizer.eps0 must be positive");

    const TrainerConfig& t = cfg.settings.trainer;
    require(t.delta > 0.0, "trainer.delta must be positive");
    require(t.max_inner_iters >= 1, "trainer.max_inner_iters must be at least 1");
    require(t.horizon > 0.0, "trainer.horizon must be positive");
    require(t.dt > 0.0, "trainer.dt must be positive");
    require(t.gamma0 > 0.0, "safety.gamma0 must be positive");
    require(t.snapshot_every >= 1, "trainer.snapshot_every must be at least 1");

    const ExperimentConfig& e = cfg.experiments;
    require(e.runs >= 1 && e.full_runs >= 1, "experiments.runs must be at least 1");
    require(e.horizon > 0.0 && e.full_horizon > 0.0, "experiments.horizon must be positive");
    require(e.dt > 0.0, "experiments.dt must be positive");
    require(e.x0.inf_max >= 0.0 && e.x0.inf_max <= 1.0,
            "experiments.x0_inf_max must lie in [0, 1]");
    require(e.x0.vac_max >= 0.0 && e.x0.vac_max <= 1.0,
            "experiments.x0_vac_max must lie in [0, 1]");

    const SimulateConfig& s = cfg.simulate;
    require(s.horizon >= 0.0, "simulate.horizon must be nonnegative");
    require(s.dt > 0.0, "simulate.dt must be positive");
    const Vec5 caps{1.0, 1.0, p.u_max, p.u_max, p.alpha_max};
    for (int i = 0; i < 5; ++i)
        require(s.controls[i] >= 0.0 && s.controls[i] <= caps[i],
                "simulate.controls must respect the one-sided control bounds");
    for (double x : s.x0.compartments())
        require(x >= 0.0 && x <= 1.0, "simulate.x0 components must lie in [0, 1]");
    require(s.x0.u_f + s.x0.i_f + s.x0.v_f <= 1.0 && s.x0.i_m + s.x0.v_m <= 1.0,
            "simulate.x0 must respect the population fractions");
}

}  // namespace sodacer
