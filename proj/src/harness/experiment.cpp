#include "zosa/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "zosa/errors.hpp"
#include "zosa/harness/external.hpp"
#include "zosa/harness/trace.hpp"
#include "zosa/parallel.hpp"

namespace zosa::harness {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Job {
  std::size_t experiment;
  std::size_t seed_index;
};

SeedSummary summarize_seed(std::uint64_t seed, const RunResult& result,
                           const std::filesystem::path& trace) {
  SeedSummary s;
  s.seed = seed;
  s.trace = trace;
  s.failure = result.failure;
  s.failure_kind = result.failure_kind;
  s.status = result.failure ? "failed" : (result.budget_exhausted ? "budget_exhausted" : "ok");
  s.initial_loss = result.initial_loss;
  s.initial_gap = result.initial_gap;
  s.final_loss = result.rows.empty() ? result.initial_loss : result.rows.back().loss;
  s.final_gap = result.rows.empty() ? result.initial_gap : result.rows.back().gap;
  s.iterations_completed = result.rows.size();
  s.optimization_queries = result.optimization_queries;
  s.diagnostic_queries = result.diagnostic_queries;
  return s;
}

// Mean and Bessel-corrected standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

void finalize(ExperimentSummary& summary) {
  std::vector<double> gaps, losses;
  summary.total_queries = 0;
  bool every_gap = true;
  for (const SeedSummary& s : summary.runs) {
    summary.total_queries += s.optimization_queries;
    if (s.status == "failed") continue;
    losses.push_back(s.final_loss);
    if (s.final_gap) {
      gaps.push_back(*s.final_gap);
    } else {
      every_gap = false;
    }
  }
  if (!losses.empty()) summary.mean_final_loss = mean_std(losses).first;
  if (!gaps.empty() && every_gap) {
    const auto [mean, sd] = mean_std(gaps);
    summary.mean_final_gap = mean;
    summary.std_final_gap = sd;
  }
}

void write_summary(const std::filesystem::path& dir, const ExperimentSummary& summary) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "summary.json", std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", (dir / "summary.json").string()));
  out << to_json(summary).dump(2) << '\n';
}

// Runs every (experiment, seed) pair through one worker pool and writes
// traces and summaries. Objectives are built once per experiment.
std::vector<ExperimentSummary> execute(const std::vector<RunSpec>& specs, std::size_t workers) {
  std::vector<Objective> objectives;
  objectives.reserve(specs.size());
  for (const RunSpec& spec : specs) objectives.push_back(make_objective(spec));

  std::vector<Job> jobs;
  std::vector<ExperimentSummary> summaries(specs.size());
  for (std::size_t e = 0; e < specs.size(); ++e) {
    summaries[e].config = to_json(specs[e]);
    summaries[e].runs.resize(specs[e].seeds.size());
    for (std::size_t s = 0; s < specs[e].seeds.size(); ++s) jobs.push_back({e, s});
  }

  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const RunSpec& spec = specs[jobs[j].experiment];
    const std::uint64_t seed = spec.seeds[jobs[j].seed_index];
    RunOptions options;
    options.query_budget = spec.query_budget;
    options.track_cosine = spec.track_cosine;
    const RunResult result = run(spec.kind, objectives[jobs[j].experiment], spec.optimizer,
                                 spec.iterations, seed, options);

    std::vector<std::string> settings = flatten_settings(summaries[jobs[j].experiment].config);
    settings.push_back(fmt::format("seed={}", seed));
    if (result.failure) settings.push_back("failure=" + *result.failure);
    const auto trace = spec.output / fmt::format("trace_seed{}.csv", seed);
    write_trace(trace, settings, subsample(result.rows, spec.iterations));
    summaries[jobs[j].experiment].runs[jobs[j].seed_index] = summarize_seed(seed, result, trace);
  });

  for (std::size_t e = 0; e < specs.size(); ++e) {
    finalize(summaries[e]);
    write_summary(specs[e].output, summaries[e]);
  }
  return summaries;
}

bool rank_before(const ExperimentSummary& a, const ExperimentSummary& b) {
  if (a.failed() != b.failed()) return !a.failed();
  const auto metric = [](const ExperimentSummary& s) {
    if (s.mean_final_gap) return *s.mean_final_gap;
    if (s.mean_final_loss) return *s.mean_final_loss;
    return std::numeric_limits<double>::infinity();
  };
  return metric(a) < metric(b);
}

}  // namespace

bool ExperimentSummary::failed() const noexcept {
  return std::any_of(runs.begin(), runs.end(),
                     [](const SeedSummary& s) { return s.status == "failed"; });
}

int ExperimentSummary::exit_code() const noexcept {
  int code = 0;
  for (const SeedSummary& s : runs) {
    if (s.failure_kind == FailureKind::peer) return 3;
    if (s.status == "failed") code = 2;
  }
  return code;
}

json to_json(const ExperimentSummary& summary) {
  json runs = json::array();
  for (const SeedSummary& s : summary.runs) {
    runs.push_back({
        {"seed", s.seed},
        {"trace", s.trace.filename().string()},
        {"status", s.status},
        {"failure", s.failure ? json(*s.failure) : json(nullptr)},
        {"initial_loss", s.initial_loss},
        {"initial_gap", optional_json(s.initial_gap)},
        {"final_loss", s.final_loss},
        {"final_gap", optional_json(s.final_gap)},
        {"iterations_completed", s.iterations_completed},
        {"optimization_queries", s.optimization_queries},
        {"diagnostic_queries", s.diagnostic_queries},
    });
  }
  return {
      {"config", summary.config},
      {"runs", runs},
      {"mean_final_gap", optional_json(summary.mean_final_gap)},
      {"std_final_gap", optional_json(summary.std_final_gap)},
      {"mean_final_loss", optional_json(summary.mean_final_loss)},
      {"total_queries", summary.total_queries},
      {"failed", summary.failed()},
  };
}

Objective make_objective(const RunSpec& spec) {
  if (spec.objective.builtin) {
    return bench::make_objective(bench::SyntheticFunction(*spec.objective.builtin, spec.dimension));
  }
  if (spec.objective.external) {
    return external_objective(*spec.objective.external, spec.dimension, spec.objective.optimum);
  }
  throw ConfigError("objective", "no objective source configured");
}

ExperimentSummary run_experiment(const RunSpec& spec) {
  return std::move(execute({spec}, spec.workers).front());
}

Grid parse_grid(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw ConfigError("grid", "must be a non-empty object");
  Grid out;
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) {
      throw ConfigError("grid." + key, "must be a non-empty array of values");
    }
    out[key] = std::vector<json>(values.begin(), values.end());
  }
  return out;
}

std::vector<std::map<std::string, json>> expand_grid(const Grid& grid) {
  if (grid.empty()) throw ConfigError("grid", "must not be empty");
  std::vector<std::map<std::string, json>> points{{}};
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("grid." + key, "must not be empty");
    std::vector<std::map<std::string, json>> next;
    next.reserve(points.size() * values.size());
    for (const auto& p : points) {
      for (const json& v : values) {
        auto q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

int SweepResult::exit_code() const noexcept {
  int code = 0;
  for (const SweepEntry& e : entries) code = std::max(code, e.summary.exit_code());
  return code;
}

SweepResult sweep(const json& base_config, const Grid& grid) {
  const RunSpec base = parse_run_spec(base_config);
  const auto points = expand_grid(grid);

  std::vector<RunSpec> specs;
  specs.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    json config = base_config;
    for (const auto& [key, value] : points[i]) set_by_path(config, key, value);
    config["output"] = (base.output / fmt::format("point_{:03}", i)).string();
    specs.push_back(parse_run_spec(config));
  }

  std::vector<ExperimentSummary> summaries = execute(specs, base.workers);
  SweepResult result;
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.entries.push_back({i, points[i], std::move(summaries[i])});
    result.leaderboard.push_back(i);
  }
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [&](std::size_t a, std::size_t b) {
                     return rank_before(result.entries[a].summary, result.entries[b].summary);
                   });

  std::filesystem::create_directories(base.output);
  std::ofstream board(base.output / "leaderboard.csv", std::ios::trunc);
  board << "rank,point,overrides,mean_final_gap,std_final_gap,mean_final_loss,total_queries,failed\n";
  for (std::size_t r = 0; r < result.leaderboard.size(); ++r) {
    const SweepEntry& e = result.entries[result.leaderboard[r]];
    json overrides(e.overrides);
    std::string cell = overrides.dump();
    // CSV-quote the JSON cell.
    std::string quoted = "\"";
    for (char c : cell) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
    quoted += '"';
    const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
    board << fmt::format("{},point_{:03},{},{},{},{},{},{}\n", r + 1, e.point, quoted,
                         opt(e.summary.mean_final_gap), opt(e.summary.std_final_gap),
                         opt(e.summary.mean_final_loss), e.summary.total_queries,
                         e.summary.failed() ? "true" : "false");
  }
  return result;
}

}  // namespace zosa::harness
