// Command-line front end: run, sweep, validate, compare.

#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "zosa/errors.hpp"
#include "zosa/harness/compare.hpp"
#include "zosa/harness/config.hpp"
#include "zosa/harness/experiment.hpp"
#include "zosa/harness/validate.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPeer = 3;

using namespace zosa;
using namespace zosa::harness;

void print_summary(const ExperimentSummary& s) {
  for (const SeedSummary& r : s.runs) {
    std::cout << "seed " << r.seed << ": " << r.status;
    if (r.final_gap) std::cout << "  final_gap=" << format_real(*r.final_gap);
    std::cout << "  queries=" << r.optimization_queries;
    if (r.failure) std::cout << "  (" << *r.failure << ")";
    std::cout << '\n';
  }
  if (s.mean_final_gap) {
    std::cout << "mean_final_gap=" << format_real(*s.mean_final_gap)
              << "  std_final_gap=" << format_real(*s.std_final_gap) << '\n';
  }
  std::cout << "total_queries=" << s.total_queries << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment over all configured seeds");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();

  std::string sweep_config, grid_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a Cartesian grid of experiments");
  sweep_cmd->add_option("--config", sweep_config, "Base experiment config (JSON)")->required();
  sweep_cmd->add_option("--grid", grid_path, "Grid: {\"optimizer.eta\": [..], ...}")->required();

  std::string kind_name, out_path = "validation.json";
  ValidationParams vp;
  auto* validate_cmd = app.add_subcommand("validate", "Check an estimator law empirically");
  validate_cmd->add_option("kind", kind_name, "sigma_law | mse_law | alignment | sam_alignment")
      ->required();
  validate_cmd->add_option("--function", vp.function,
                           "quadratic | cubic | levy | rosenbrock | linear | constant");
  validate_cmd->add_option("--dimension", vp.dimension);
  validate_cmd->add_option("--m", vp.m, "Directions per estimate");
  validate_cmd->add_option("--epsilon", vp.epsilon);
  validate_cmd->add_option("--rho", vp.rho);
  validate_cmd->add_option("--trials", vp.trials);
  validate_cmd->add_option("--tolerance", vp.tolerance);
  validate_cmd->add_option("--theta", vp.theta, "ones | random (sigma_law, mse_law)");
  validate_cmd->add_option("--seed", vp.seed);
  validate_cmd->add_option("--workers", vp.workers);
  validate_cmd->add_option("--out", out_path, "Report file");

  std::string traces_dir;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate final gaps and query counts");
  compare_cmd->add_option("--traces", traces_dir, "Directory holding trace files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      const ExperimentSummary summary = run_experiment(load_run_spec(config_path));
      print_summary(summary);
      return summary.exit_code();
    }
    if (sweep_cmd->parsed()) {
      const SweepResult result = sweep(load_json(sweep_config), parse_grid(load_json(grid_path)));
      std::cout << "rank point      mean_final_gap  overrides\n";
      for (std::size_t r = 0; r < result.leaderboard.size(); ++r) {
        const SweepEntry& e = result.entries[result.leaderboard[r]];
        const auto& gap = e.summary.mean_final_gap;
        std::cout << fmt::format("{:<5}point_{:03}  ", r + 1, e.point)
                  << (gap ? format_real(*gap) : std::string("n/a")) << "   "
                  << nlohmann::json(e.overrides).dump() << (e.summary.failed() ? "  [failed]" : "")
                  << '\n';
      }
      return result.exit_code();
    }
    if (validate_cmd->parsed()) {
      const ValidationOutcome outcome =
          validate_to_file(parse_validation_kind(kind_name), vp, out_path);
      std::cout << outcome.report.dump(2) << '\n';
      return outcome.passed ? 0 : kExitRuntime;
    }
    if (compare_cmd->parsed()) {
      std::cout << render_table(compare_traces(traces_dir));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PeerError& e) {
    std::cerr << "peer error: " << e.what() << '\n';
    return kExitPeer;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
