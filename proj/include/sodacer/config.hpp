#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sodacer/experiments.hpp"

namespace sodacer {

// Flat "[section] / key = value" store. Keys are addressed as "section.key".
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_text(const std::string& text, const std::string& origin = "<inline>");

    // "section.key=value" override, CLI syntax
    void apply_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    Vec5 get_vec5(const std::string& key, const Vec5& fallback) const;

    // Keys present in the map but never read by any getter: typos.
    std::vector<std::string> unconsumed() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

struct SimulateConfig {
    Vec5 controls{};
    SystemState x0{0.05, 0.05, 0.0, 0.05, 0.0, 0.0};
    double horizon = 20.0;
    double dt = 0.01;
};

struct ExperimentConfig {
    int runs = 20;           // desk scale
    int full_runs = 200;     // behind --full
    double horizon = 10.0;
    double full_horizon = 20.0;
    double dt = 0.01;
    X0Sampler x0;
};

struct AppConfig {
    RunSettings settings;
    SimulateConfig simulate;
    ExperimentConfig experiments;
};

// Defaults -> file values -> CLI overrides, in that precedence order.
// Unknown keys and invariant violations raise ConfigError.
AppConfig load_app_config(const std::optional<std::string>& file,
                          const std::vector<std::string>& overrides);

// Every domain invariant checked in one place; throws ConfigError naming the
// first violated one.
void validate(const AppConfig& cfg);

}  // namespace sodacer
