#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zosa/harness/config.hpp"
#include "zosa/optimizers.hpp"

namespace zosa::harness {

struct SeedSummary {
  std::uint64_t seed = 0;
  std::filesystem::path trace;
  std::string status;  // "ok", "budget_exhausted" or "failed"
  std::optional<std::string> failure;
  FailureKind failure_kind = FailureKind::none;
  std::optional<double> initial_gap;
  std::optional<double> final_gap;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::uint64_t iterations_completed = 0;
  std::uint64_t optimization_queries = 0;
  std::uint64_t diagnostic_queries = 0;
};

struct ExperimentSummary {
  nlohmann::json config;
  std::vector<SeedSummary> runs;
  // Over successful seeds; absent when none succeeded or no gap is defined.
  std::optional<double> mean_final_gap;
  std::optional<double> std_final_gap;
  std::optional<double> mean_final_loss;
  std::uint64_t total_queries = 0;

  bool failed() const noexcept;
  // Process exit code: 0 success, 2 evaluation/divergence, 3 peer protocol.
  int exit_code() const noexcept;
};

nlohmann::json to_json(const ExperimentSummary& summary);

// Objective named by the run configuration (builtin function or external peer).
Objective make_objective(const RunSpec& spec);

/// Runs every seed (concurrently, up to spec.workers), writes
/// <output>/trace_seed<seed>.csv per seed and <output>/summary.json, and
/// returns the summary. Per-seed failures are recorded, not thrown.
ExperimentSummary run_experiment(const RunSpec& spec);

using Grid = std::map<std::string, std::vector<nlohmann::json>>;

// Parses {"optimizer.eta": [..], ...}; throws ConfigError on an empty grid
// or an empty value list.
Grid parse_grid(const nlohmann::json& grid);

// Cartesian product of the grid, keys in sorted order, last key fastest.
std::vector<std::map<std::string, nlohmann::json>> expand_grid(const Grid& grid);

struct SweepEntry {
  std::size_t point = 0;
  std::map<std::string, nlohmann::json> overrides;
  ExperimentSummary summary;
};

struct SweepResult {
  std::vector<SweepEntry> entries;      // in grid order
  std::vector<std::size_t> leaderboard;  // indices into entries, best first

  int exit_code() const noexcept;
};

/// Executes every grid point as run_experiment under
/// <base output>/point_<NNN>, all (point, seed) jobs sharing one worker pool.
/// Writes <base output>/leaderboard.csv ranked by mean final gap (mean final
/// loss when no gap is defined); points with failed seeds rank last.
SweepResult sweep(const nlohmann::json& base_config, const Grid& grid);

}  // namespace zosa::harness
