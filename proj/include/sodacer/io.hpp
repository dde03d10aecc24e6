#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sodacer/config.hpp"
#include "sodacer/experiments.hpp"

namespace sodacer::io {

// 17 significant digits: enough for bit-stable double round-trips.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

void write_trajectory_csv(const std::filesystem::path& path, const RunResult& run);
void write_safety_log_csv(const std::filesystem::path& path, const RunResult& run,
                          const BarrierSet& barriers);
void write_optimizer_trace_csv(const std::filesystem::path& path, const RunResult& run);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSummary& summary);
void write_friedman_csv(const std::filesystem::path& path, const ComparisonReport& report);
void write_mean_cost_csv(const std::filesystem::path& path, const ComparisonReport& report,
                         std::size_t scenario_index);

nlohmann::json run_summary_json(const RunResult& run);
nlohmann::json comparison_json(const ComparisonReport& report);
nlohmann::json config_echo(const AppConfig& cfg);

// Self-describing run manifest: config echo, seed bookkeeping, version,
// wall-clock. Everything needed to re-run the experiment.
nlohmann::json manifest_json(const AppConfig& cfg, const std::string& command,
                             const std::vector<std::string>& scenario_ids, int runs,
                             double wall_clock_seconds);

}  // namespace sodacer::io
