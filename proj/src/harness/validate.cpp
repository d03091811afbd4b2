#include "zosa/harness/validate.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "zosa/benchmarks.hpp"
#include "zosa/diagnostics.hpp"
#include "zosa/errors.hpp"

namespace zosa::harness {

using nlohmann::json;

namespace {

struct Resolved {
  std::string function;
  std::size_t dimension;
  std::size_t m;
  double epsilon;
  double rho;
  std::size_t trials;
  double tolerance;
  std::string theta;
};

Resolved resolve(ValidationKind kind, const ValidationParams& p) {
  Resolved r{"quadratic", 10, 32, 1e-3, 1e-5, 10000, 0.02, "ones"};
  switch (kind) {
    case ValidationKind::sigma_law:
      break;
    case ValidationKind::mse_law:
      r.function = "linear";
      r.dimension = 20;
      r.m = 5;
      r.tolerance = 0.05;
      break;
    case ValidationKind::alignment:
    case ValidationKind::sam_alignment:
      r.dimension = 100;
      r.m = 1000;
      r.trials = 100;
      r.tolerance = 0.05;
      break;
  }
  r.function = p.function.value_or(r.function);
  r.dimension = p.dimension.value_or(r.dimension);
  r.m = p.m.value_or(r.m);
  r.epsilon = p.epsilon.value_or(r.epsilon);
  r.rho = p.rho.value_or(r.rho);
  r.trials = p.trials.value_or(r.trials);
  r.tolerance = p.tolerance.value_or(r.tolerance);
  r.theta = p.theta.value_or(r.theta);
  if (r.theta != "ones" && r.theta != "random") {
    throw ConfigError("theta", fmt::format("expected 'ones' or 'random', got '{}'", r.theta));
  }
  return r;
}

Objective build_objective(const std::string& function, std::size_t d) {
  if (function == "linear") return diag::linear_objective(Vector::filled(d, 1.0));
  if (function == "constant") return diag::constant_objective(d, 1.0);
  return bench::make_objective(bench::SyntheticFunction(bench::parse_function_kind(function), d));
}

json alignment_json(const diag::AlignmentReport& r) {
  return {{"mean_cos", r.mean_cos}, {"max_cos", r.max_cos}, {"trials", r.trials},
          {"predicted_cos", r.predicted_cos}};
}

json law_json(const diag::LawReport& r) {
  return {{"empirical", r.empirical}, {"predicted", r.predicted},
          {"relative_error", std::isfinite(r.relative_error) ? json(r.relative_error) : json(nullptr)},
          {"trials", r.trials}};
}

}  // namespace

ValidationKind parse_validation_kind(const std::string& name) {
  if (name == "sigma_law") return ValidationKind::sigma_law;
  if (name == "mse_law") return ValidationKind::mse_law;
  if (name == "alignment") return ValidationKind::alignment;
  if (name == "sam_alignment") return ValidationKind::sam_alignment;
  throw ConfigError("kind", fmt::format("unknown validation kind '{}'", name));
}

ValidationOutcome validate(ValidationKind kind, const ValidationParams& params) {
  const Resolved r = resolve(kind, params);
  const Objective obj = build_objective(r.function, r.dimension);
  EstimatorConfig cfg{r.epsilon, r.m, DirectionKind::rademacher};
  cfg.validate();
  QueryCounter counter;

  Vector theta = Vector::filled(r.dimension, 1.0);
  if (r.theta == "random") {
    RngStream rng = RngStream(params.seed).split(0xFFFF);
    theta = sample_gaussian(r.dimension, rng);
  }

  ValidationOutcome out;
  json& rep = out.report;
  rep["params"] = {{"function", r.function}, {"dimension", r.dimension}, {"m", r.m},
                   {"epsilon", r.epsilon}, {"trials", r.trials}, {"seed", params.seed},
                   {"tolerance", r.tolerance}};
  switch (kind) {
    case ValidationKind::sigma_law: {
      rep["kind"] = "sigma_law";
      rep["params"]["theta"] = r.theta;
      const auto law = diag::sigma_law_study(obj, cfg, theta, r.trials, params.seed, counter, params.workers);
      rep["result"] = law_json(law);
      out.passed = law.relative_error <= r.tolerance;
      break;
    }
    case ValidationKind::mse_law: {
      rep["kind"] = "mse_law";
      rep["params"]["theta"] = r.theta;
      const auto law = diag::mse_law_study(obj, cfg, theta, r.trials, params.seed, counter, params.workers);
      rep["result"] = law_json(law);
      out.passed = law.relative_error <= r.tolerance;
      break;
    }
    case ValidationKind::alignment: {
      rep["kind"] = "alignment";
      rep["params"]["rho"] = r.rho;
      const auto a = diag::gradient_alignment_study(obj, cfg, r.rho, r.trials, params.seed, counter,
                                                    params.workers);
      rep["result"] = {{"g_t", alignment_json(a.initial)}, {"g_pert", alignment_json(a.perturbed)}};
      out.passed = std::abs(a.initial.mean_cos - a.initial.predicted_cos) <= r.tolerance;
      break;
    }
    case ValidationKind::sam_alignment: {
      rep["kind"] = "sam_alignment";
      rep["params"]["rho"] = r.rho;
      const auto s = diag::sam_alignment_study(obj, cfg, r.rho, r.trials, params.seed, counter,
                                               params.workers);
      rep["result"] = alignment_json(s.alignment);
      rep["result"]["mean_radius_ratio"] = s.mean_radius_ratio;
      rep["result"]["mean_scaled_radius_ratio"] = s.mean_scaled_radius_ratio;
      out.passed = s.alignment.mean_cos >= 0.9 && s.mean_scaled_radius_ratio >= 0.8 &&
                   s.mean_scaled_radius_ratio <= 1.25;
      break;
    }
  }
  rep["diagnostic_queries"] = counter.diagnostic();
  rep["pass"] = out.passed;
  return out;
}

ValidationOutcome validate_to_file(ValidationKind kind, const ValidationParams& params,
                                   const std::filesystem::path& out) {
  ValidationOutcome outcome = validate(kind, params);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::trunc);
  if (!file) throw Error(fmt::format("cannot write {}", out.string()));
  file << outcome.report.dump(2) << '\n';
  return outcome;
}

}  // namespace zosa::harness
