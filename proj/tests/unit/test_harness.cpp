#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "doctest.h"
#include "scratch_dir.hpp"
#include "zosa/errors.hpp"
#include "zosa/harness/compare.hpp"
#include "zosa/harness/config.hpp"
#include "zosa/harness/experiment.hpp"
#include "zosa/harness/trace.hpp"
#include "zosa/harness/validate.hpp"

using namespace zosa;
using namespace zosa::harness;
using nlohmann::json;

namespace {

json small_config(const std::filesystem::path& out) {
  return json{{"optimizer", {{"kind", "zosa"}, {"m", 4}}},
              {"objective", {{"function", "quadratic"}}},
              {"dimension", 10},
              {"iterations", 100},
              {"seeds", {0, 1, 2}},
              {"output", out.string()}};
}

std::string config_error_field(const json& config) {
  try {
    parse_run_spec(config);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("config defaults") {
  const RunSpec spec = parse_run_spec(json{{"objective", {{"function", "levy"}}}});
  CHECK(spec.kind == OptimizerKind::zosa);
  CHECK(spec.dimension == 100);
  CHECK(spec.iterations == 2000);
  CHECK(spec.seeds == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(spec.optimizer.estimator.m == 32);
  CHECK(spec.optimizer.estimator.epsilon == 1e-3);
  CHECK(spec.optimizer.rho == 1e-5);

  const RunSpec baseline =
      parse_run_spec(json{{"optimizer", {{"kind", "zo_rmsprop"}}}, {"objective", {{"function", "cubic"}}}});
  CHECK(baseline.optimizer.estimator.epsilon == 5e-3);
  CHECK(baseline.optimizer.estimator.direction == DirectionKind::gaussian);
}

TEST_CASE("config errors name the offending field") {
  json c = small_config("x");
  c["optimizer"]["etaa"] = 1.0;
  CHECK(config_error_field(c) == "optimizer.etaa");

  c = small_config("x");
  c["optimizer"]["eta"] = -1.0;
  CHECK(config_error_field(c) == "optimizer.eta");

  c = small_config("x");
  c["seeds"] = json::array();
  CHECK(config_error_field(c) == "seeds");

  c = small_config("x");
  c["iterations"] = 0;
  CHECK(config_error_field(c) == "iterations");

  c = small_config("x");
  c["objective"]["external"] = {{"command", {"cat"}}};
  CHECK(config_error_field(c) == "objective");

  c = small_config("x");
  c["objective"] = {{"function", "rosenbrock"}};
  c["dimension"] = 1;
  CHECK(config_error_field(c) == "dimension");

  c = small_config("x");
  c["optimizer"]["m"] = "four";
  CHECK(config_error_field(c) == "optimizer.m");
}

TEST_CASE("resolved config round-trips and flattens in key order") {
  const RunSpec spec = parse_run_spec(small_config("out"));
  const json resolved = to_json(spec);
  CHECK(to_json(parse_run_spec(resolved)) == resolved);
  const std::vector<std::string> flat = flatten_settings(resolved);
  CHECK(std::is_sorted(flat.begin(), flat.end()));
  CHECK(std::find(flat.begin(), flat.end(), "optimizer.m=4") != flat.end());
  CHECK(std::find(flat.begin(), flat.end(), "optimizer.rho=1.0000000000000001e-05") != flat.end());
}

TEST_CASE("set_by_path creates nested objects") {
  json c = json::object();
  set_by_path(c, "optimizer.eta", 0.5);
  set_by_path(c, "dimension", 3);
  CHECK(c["optimizer"]["eta"] == 0.5);
  CHECK(c["dimension"] == 3);
}

TEST_CASE("trace rows round-trip bit for bit") {
  ScratchDir dir("trace");
  std::vector<TraceRow> rows;
  rows.push_back({1, 0.1, 0.1, 1.0 / 3.0, std::nullopt, 2e-300, 10, -0.7071067811865476, 0.25});
  rows.push_back({2, 1e-17, std::nullopt, std::nullopt, 5.5, std::nullopt, 20, std::nullopt, 1.5});
  write_trace(dir / "t.csv", {"a=1", "b=x"}, rows);
  const TraceFile back = read_trace(dir / "t.csv");
  CHECK(back.settings.at("a") == "1");
  CHECK(back.settings.at("b") == "x");
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].sigma == rows[0].sigma);
  CHECK(back.rows[0].eps_sam_norm == rows[0].eps_sam_norm);
  CHECK(back.rows[0].cos_true == rows[0].cos_true);
  CHECK_FALSE(back.rows[0].sigma_pert.has_value());
  CHECK(back.rows[1].loss == rows[1].loss);
  CHECK_FALSE(back.rows[1].gap.has_value());
  CHECK(back.rows[1].queries_cum == 20);
  CHECK(slurp(dir / "t.csv").find(kTraceColumns) != std::string::npos);
}

TEST_CASE("trace subsampling") {
  std::vector<TraceRow> rows(2500);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].iter = i + 1;
  const auto kept = subsample(rows, 2500);
  // 1..1000, then multiples of 3 up to 2499, then the final row.
  CHECK(kept.size() == 1000 + (2499 / 3 - 1000 / 3) + 1);
  CHECK(kept.back().iter == 2500);
  std::vector<TraceRow> short_rows(700);
  for (std::size_t i = 0; i < short_rows.size(); ++i) short_rows[i].iter = i + 1;
  CHECK(subsample(short_rows, 700).size() == 700);
}

TEST_CASE("run_experiment writes one trace per seed and a summary") {
  ScratchDir dir("experiment");
  const ExperimentSummary s = run_experiment(parse_run_spec(small_config(dir / "run")));
  REQUIRE(s.runs.size() == 3);
  double sum = 0.0;
  for (const SeedSummary& r : s.runs) {
    CHECK(std::filesystem::exists(dir / "run" / ("trace_seed" + std::to_string(r.seed) + ".csv")));
    CHECK(r.optimization_queries == 1000);
    CHECK(r.status == "ok");
    sum += *r.final_gap;
  }
  CHECK(*s.mean_final_gap == doctest::Approx(sum / 3.0).epsilon(1e-15));
  CHECK(s.total_queries == 3000);
  CHECK(s.exit_code() == 0);

  const json summary = json::parse(slurp(dir / "run" / "summary.json"));
  CHECK(summary["total_queries"] == 3000);
  CHECK(summary["runs"].size() == 3);

  // Every resolved hyperparameter appears in the trace header.
  const TraceFile trace = read_trace(dir / "run" / "trace_seed1.csv");
  for (const std::string& kv : flatten_settings(s.config)) {
    const auto eq = kv.find('=');
    CHECK(trace.settings.at(kv.substr(0, eq)) == kv.substr(eq + 1));
  }
  CHECK(trace.settings.at("seed") == "1");
  CHECK(trace.rows.back().queries_cum == 1000);
}

TEST_CASE("repeated experiments produce identical traces") {
  ScratchDir dir("replay");
  json a = small_config(dir / "a");
  json b = small_config(dir / "b");
  b["workers"] = 1;
  run_experiment(parse_run_spec(a));
  run_experiment(parse_run_spec(b));
  for (int seed = 0; seed < 3; ++seed) {
    const std::string name = "trace_seed" + std::to_string(seed) + ".csv";
    std::string ta = trace_without_wall_time(dir / "a" / name);
    std::string tb = trace_without_wall_time(dir / "b" / name);
    // The headers differ only in output path and worker count.
    const auto strip = [](std::string t) {
      std::string out, line;
      std::istringstream in(t);
      while (std::getline(in, line)) {
        if (line.rfind("# output=", 0) == 0 || line.rfind("# workers=", 0) == 0) continue;
        out += line + '\n';
      }
      return out;
    };
    CHECK(strip(ta) == strip(tb));
  }
}

TEST_CASE("failed seeds are marked in the summary") {
  ScratchDir dir("failure");
  json c = small_config(dir / "run");
  c["optimizer"] = {{"kind", "zo_sgd"}, {"m", 4}, {"eta", 1e300}};
  c["objective"] = {{"function", "cubic"}};
  c["seeds"] = {5};
  const ExperimentSummary s = run_experiment(parse_run_spec(c));
  CHECK(s.failed());
  CHECK(s.exit_code() == 2);
  CHECK(s.runs[0].status == "failed");
  CHECK(s.runs[0].failure.has_value());
  CHECK(slurp(dir / "run" / "trace_seed5.csv").find("# failure=") != std::string::npos);
  CHECK(json::parse(slurp(dir / "run" / "summary.json"))["failed"] == true);
}

TEST_CASE("grid expansion") {
  CHECK_THROWS_AS(parse_grid(json::object()), ConfigError);
  CHECK_THROWS_AS(parse_grid(json{{"optimizer.eta", json::array()}}), ConfigError);
  const Grid two = parse_grid(json{{"optimizer.eta", {1e-3, 1e-4}}});
  CHECK(expand_grid(two).size() == 2);
  const Grid fifteen =
      parse_grid(json{{"optimizer.eta", {1e-3, 1e-4, 1e-5}}, {"optimizer.rho", {0, 1e-7, 1e-6, 1e-5, 1e-4}}});
  const auto points = expand_grid(fifteen);
  CHECK(points.size() == 15);
  CHECK(points[0].at("optimizer.rho") == 0);
  CHECK(points[1].at("optimizer.rho") == 1e-7);
}

TEST_CASE("sweep runs the product and ranks by mean final gap") {
  ScratchDir dir("sweep");
  json base = small_config(dir / "sweep");
  base["iterations"] = 20;
  base["seeds"] = {0};
  const SweepResult two = sweep(base, parse_grid(json{{"optimizer.eta", {1e-4, 1e-3}}}));
  CHECK(two.entries.size() == 2);

  const SweepResult r = sweep(
      base, parse_grid(json{{"optimizer.eta", {1e-5, 1e-4, 1e-3}},
                            {"optimizer.rho", {0, 1e-7, 1e-6, 1e-5, 1e-4}}}));
  REQUIRE(r.entries.size() == 15);
  CHECK(std::filesystem::exists(dir / "sweep" / "point_014" / "summary.json"));

  // Re-scan the written summaries for the minimum.
  double best = INFINITY;
  for (int i = 0; i < 15; ++i) {
    const json s = json::parse(slurp(dir / "sweep" / fmt::format("point_{:03}", i) / "summary.json"));
    best = std::min(best, s["mean_final_gap"].get<double>());
  }
  CHECK(*r.entries[r.leaderboard.front()].summary.mean_final_gap == best);

  std::ifstream board(dir / "sweep" / "leaderboard.csv");
  std::string header, first;
  std::getline(board, header);
  std::getline(board, first);
  CHECK(first.rfind("1,point_", 0) == 0);
}

TEST_CASE("compare tabulates traces by optimizer") {
  ScratchDir dir("compare");
  json a = small_config(dir / "zosa");
  json b = small_config(dir / "fzoo");
  b["optimizer"]["kind"] = "fzoo";
  run_experiment(parse_run_spec(a));
  run_experiment(parse_run_spec(b));
  const auto rows = compare_traces(dir.path());
  REQUIRE(rows.size() == 2);
  for (const CompareRow& row : rows) {
    CHECK(row.runs == 3);
    CHECK(row.objective == "quadratic");
    CHECK(row.mean_queries == (row.optimizer == "zosa" ? 1000.0 : 500.0));
  }
  const std::string table = render_table(rows);
  CHECK(table.find("fzoo") != std::string::npos);
  CHECK_THROWS(compare_traces(dir / "missing"));
}

TEST_CASE("validate writes a report with a verdict") {
  ScratchDir dir("validate");
  ValidationParams p;
  p.trials = 2000;
  const ValidationOutcome out = validate_to_file(ValidationKind::sigma_law, p, dir / "sigma.json");
  const json report = json::parse(slurp(dir / "sigma.json"));
  CHECK(report["pass"] == out.passed);
  CHECK(report["kind"] == "sigma_law");
  CHECK(out.passed);

  ValidationParams constant;
  constant.function = "constant";
  CHECK(validate(ValidationKind::sigma_law, constant).passed);

  ValidationParams sam;
  sam.trials = 20;
  const ValidationOutcome s = validate(ValidationKind::sam_alignment, sam);
  CHECK(s.passed);

  ValidationParams bad;
  bad.function = "sphere";
  CHECK_THROWS_AS(validate(ValidationKind::alignment, bad), ConfigError);
  CHECK_THROWS_AS(parse_validation_kind("flatness"), ConfigError);
}
