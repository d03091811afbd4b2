#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zosa/benchmarks.hpp"
#include "zosa/optimizers.hpp"

namespace zosa::harness {

// Where an external objective lives: a child process (argv in `command`) or a
// TCP peer (`host`:`port`). Exactly one of the two is set.
struct ExternalAddress {
  std::vector<std::string> command;
  std::string host;
  std::uint16_t port = 0;
  std::chrono::milliseconds timeout{10000};

  bool is_process() const noexcept { return !command.empty(); }
};

struct ObjectiveSource {
  std::optional<bench::FunctionKind> builtin;
  std::optional<ExternalAddress> external;
  std::optional<double> optimum;  // external objectives only; builtins know theirs
};

/// One experiment: an optimizer configuration applied to one objective for a
/// list of seeds.
///
/// JSON layout (unknown keys are rejected, omitted keys take defaults):
///
///   {
///     "optimizer": {"kind": "zosa", "eta": 1e-4, "rho": 1e-5, "epsilon": 1e-3,
///                   "m": 32, "direction": "rademacher", "beta1": 0.9,
///                   "beta2": 0.999, "moment_epsilon": 1e-8, "sigma_floor": 1e-12},
///     "objective": {"function": "quadratic"},
///     "dimension": 100, "iterations": 2000, "query_budget": null,
///     "seeds": [0, 1, 2], "output": "runs/zosa", "workers": 0,
///     "track_cosine": false
///   }
///
/// An external objective replaces "function" with
///   "external": {"command": ["python3", "peer.py"], "timeout_ms": 10000}
/// or
///   "external": {"host": "127.0.0.1", "port": 7000, "timeout_ms": 10000}
/// and may add "optimum": <number> to enable the gap column.
struct RunSpec {
  OptimizerKind kind = OptimizerKind::zosa;
  OptimizerConfig optimizer = OptimizerConfig::defaults(OptimizerKind::zosa);
  ObjectiveSource objective;
  std::size_t dimension = 100;
  std::uint64_t iterations = 2000;
  std::optional<std::uint64_t> query_budget;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::filesystem::path output = "runs";
  std::size_t workers = 0;
  bool track_cosine = false;
};

// Throws ConfigError naming the offending field.
RunSpec parse_run_spec(const nlohmann::json& config);
RunSpec load_run_spec(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

// Fully resolved configuration, defaults included.
nlohmann::json to_json(const RunSpec& spec);

// "key=value" lines for every resolved setting, dotted paths, sorted by key.
std::vector<std::string> flatten_settings(const nlohmann::json& resolved);

// Sets a dotted path ("optimizer.eta") inside a config document, creating
// intermediate objects.
void set_by_path(nlohmann::json& config, const std::string& dotted, const nlohmann::json& value);

// Renders a double with 17 significant digits.
std::string format_real(double value);

}  // namespace zosa::harness
