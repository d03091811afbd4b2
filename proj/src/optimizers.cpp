#include "zosa/optimizers.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "zosa/diagnostics.hpp"
#include "zosa/errors.hpp"

namespace zosa {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kStepStream = 2;

void require_finite_param(const char* field, double value) {
  if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
}

std::optional<double> cosine_if_tracked(const Objective& obj, const StepOptions& options,
                                        const Vector& estimate, const Vector& at) {
  if (!options.track_cosine || !obj.has_gradient()) return std::nullopt;
  return diag::cosine_similarity(estimate, obj.gradient(at));
}

// Shared body of the baselines: one classical estimate with N = m, then a
// rule-specific update.
template <class Update>
StepOutcome classical_step(const OptimizerState& state, const Objective& obj,
                           const OptimizerConfig& cfg, QueryCounter& counter,
                           const StepOptions& options, Update&& update) {
  OptimizerState next = state;
  const Vector g = classical_two_sided_estimate(obj, state.theta, cfg.estimator.epsilon,
                                                cfg.estimator.m, next.rng, counter);
  next.t = state.t + 1;
  StepReport report;
  report.grad_norm_est = norm(g);
  report.queries_used = 2 * cfg.estimator.m;
  report.cos_true = cosine_if_tracked(obj, options, g, state.theta);
  update(next, g, report);
  return {std::move(next), report};
}

}  // namespace

std::string_view to_string(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::zosa: return "zosa";
    case OptimizerKind::fzoo: return "fzoo";
    case OptimizerKind::zo_sgd: return "zo_sgd";
    case OptimizerKind::zo_sign_sgd: return "zo_sign_sgd";
    case OptimizerKind::zo_adamm: return "zo_adamm";
    case OptimizerKind::zo_rmsprop: return "zo_rmsprop";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (auto kind : {OptimizerKind::zosa, OptimizerKind::fzoo, OptimizerKind::zo_sgd,
                    OptimizerKind::zo_sign_sgd, OptimizerKind::zo_adamm,
                    OptimizerKind::zo_rmsprop}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("optimizer.kind", fmt::format("unknown optimizer '{}'", name));
}

bool uses_classical_estimator(OptimizerKind kind) noexcept {
  return kind != OptimizerKind::zosa && kind != OptimizerKind::fzoo;
}

OptimizerConfig OptimizerConfig::defaults(OptimizerKind kind) {
  OptimizerConfig cfg;
  if (uses_classical_estimator(kind)) {
    cfg.estimator.epsilon = 5e-3;
    cfg.estimator.direction = DirectionKind::gaussian;
    cfg.eta = 1e-3;
  }
  return cfg;
}

void OptimizerConfig::validate(OptimizerKind kind) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("optimizer.eta", "must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("optimizer.rho", "must be non-negative");
  if (!(sigma_floor > 0.0)) throw ConfigError("optimizer.sigma_floor", "must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1", "must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2", "must lie in [0, 1)");
  if (!(moment_epsilon > 0.0)) throw ConfigError("optimizer.moment_epsilon", "must be positive");
  require_finite_param("optimizer.sigma_floor", sigma_floor);
  require_finite_param("optimizer.moment_epsilon", moment_epsilon);
  try {
    estimator.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("optimizer." + e.field(), e.what());
  }
  const auto wanted = uses_classical_estimator(kind) ? DirectionKind::gaussian
                                                     : DirectionKind::rademacher;
  if (estimator.direction != wanted) {
    throw ConfigError("optimizer.direction",
                      fmt::format("{} requires {} directions", to_string(kind), to_string(wanted)));
  }
}

OptimizerState initial_state(OptimizerKind kind, Vector theta, RngStream rng) {
  OptimizerState state{std::move(theta), 0, std::nullopt, std::nullopt, rng};
  const std::size_t d = state.theta.size();
  if (kind == OptimizerKind::zo_adamm) state.first_moment = Vector::zeros(d);
  if (kind == OptimizerKind::zo_adamm || kind == OptimizerKind::zo_rmsprop) {
    state.second_moment = Vector::zeros(d);
  }
  return state;
}

std::uint64_t queries_per_step(OptimizerKind kind, const OptimizerConfig& cfg) noexcept {
  const std::uint64_t m = cfg.estimator.m;
  switch (kind) {
    case OptimizerKind::zosa: return 2 * (m + 1);
    case OptimizerKind::fzoo: return m + 1;
    default: return 2 * m;
  }
}

Vector sam_perturbation(const Vector& g, double sigma, double rho, double sigma_floor) {
  if (sigma > sigma_floor) return (rho / sigma) * g;
  return Vector::zeros(g.size());
}

double adaptive_step_size(double eta, double sigma, double sigma_floor) noexcept {
  return sigma > sigma_floor ? eta / sigma : eta;
}

Vector descend(const Vector& theta, const Vector& direction, double step, std::uint64_t t) {
  require_same_size(theta, direction);
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - step * direction[i];
  if (!std::isfinite(step) || !all_finite(out)) throw DivergenceError(t, step);
  return Vector(std::move(out));
}

Vector sign_of(const Vector& g) {
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
  return Vector(std::move(s));
}

MomentUpdate adamm_update(const Vector& theta, const Vector& grad, const Vector& first_moment,
                          const Vector& second_moment, std::uint64_t t,
                          const OptimizerConfig& cfg) {
  const std::size_t d = theta.size();
  require_same_size(theta, grad);
  require_same_size(theta, first_moment);
  require_same_size(theta, second_moment);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  std::vector<double> m(d), v(d), dir(d);
  for (std::size_t i = 0; i < d; ++i) {
    m[i] = cfg.beta1 * first_moment[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * second_moment[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    dir[i] = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.moment_epsilon);
  }
  if (!all_finite(dir)) throw DivergenceError(t, cfg.eta);
  return {descend(theta, Vector(std::move(dir)), cfg.eta, t), Vector(std::move(m)),
          Vector(std::move(v))};
}

MomentUpdate rmsprop_update(const Vector& theta, const Vector& grad, const Vector& second_moment,
                            std::uint64_t t, const OptimizerConfig& cfg) {
  const std::size_t d = theta.size();
  require_same_size(theta, grad);
  require_same_size(theta, second_moment);
  std::vector<double> v(d), dir(d);
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = cfg.beta2 * second_moment[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    dir[i] = grad[i] / (std::sqrt(v[i]) + cfg.moment_epsilon);
  }
  if (!all_finite(dir)) throw DivergenceError(t, cfg.eta);
  return {descend(theta, Vector(std::move(dir)), cfg.eta, t), std::nullopt, Vector(std::move(v))};
}

StepOutcome zosa_step(const OptimizerState& state, const Objective& obj,
                      const OptimizerConfig& cfg, QueryCounter& counter,
                      const StepOptions& options) {
  OptimizerState next = state;
  const std::uint64_t t = state.t + 1;

  const EstimateResult at_theta = one_sided_estimate(obj, state.theta, cfg.estimator, next.rng, counter);
  const Vector eps_sam = sam_perturbation(at_theta.grad, at_theta.sigma, cfg.rho, cfg.sigma_floor);
  const Vector perturbed = state.theta + eps_sam;
  // Fresh directions: the stream has moved past those used above.
  const EstimateResult at_pert = one_sided_estimate(obj, perturbed, cfg.estimator, next.rng, counter);
  const double eta_adaptive = adaptive_step_size(cfg.eta, at_pert.sigma, cfg.sigma_floor);

  next.theta = descend(state.theta, at_pert.grad, eta_adaptive, t);
  next.t = t;

  StepReport report;
  report.loss_before = at_theta.base_loss;
  report.grad_norm_est = norm(at_pert.grad);
  report.sigma = at_theta.sigma;
  report.sigma_pert = at_pert.sigma;
  report.eps_sam_norm = norm(eps_sam);
  report.step_size = eta_adaptive;
  report.sam_fallback = !(at_theta.sigma > cfg.sigma_floor);
  report.eta_fallback = !(at_pert.sigma > cfg.sigma_floor);
  report.queries_used = at_theta.queries + at_pert.queries;
  report.cos_true = cosine_if_tracked(obj, options, at_pert.grad, perturbed);
  return {std::move(next), report};
}

StepOutcome fzoo_step(const OptimizerState& state, const Objective& obj,
                      const OptimizerConfig& cfg, QueryCounter& counter,
                      const StepOptions& options) {
  OptimizerState next = state;
  const std::uint64_t t = state.t + 1;
  const EstimateResult est = one_sided_estimate(obj, state.theta, cfg.estimator, next.rng, counter);
  const double eta_adaptive = adaptive_step_size(cfg.eta, est.sigma, cfg.sigma_floor);
  next.theta = descend(state.theta, est.grad, eta_adaptive, t);
  next.t = t;

  StepReport report;
  report.loss_before = est.base_loss;
  report.grad_norm_est = norm(est.grad);
  report.sigma = est.sigma;
  report.step_size = eta_adaptive;
  report.eta_fallback = !(est.sigma > cfg.sigma_floor);
  report.queries_used = est.queries;
  report.cos_true = cosine_if_tracked(obj, options, est.grad, state.theta);
  return {std::move(next), report};
}

StepOutcome zo_sgd_step(const OptimizerState& state, const Objective& obj,
                        const OptimizerConfig& cfg, QueryCounter& counter,
                        const StepOptions& options) {
  return classical_step(state, obj, cfg, counter, options,
                        [&](OptimizerState& next, const Vector& g, StepReport& report) {
                          next.theta = descend(state.theta, g, cfg.eta, next.t);
                          report.step_size = cfg.eta;
                        });
}

StepOutcome zo_sign_sgd_step(const OptimizerState& state, const Objective& obj,
                             const OptimizerConfig& cfg, QueryCounter& counter,
                             const StepOptions& options) {
  return classical_step(state, obj, cfg, counter, options,
                        [&](OptimizerState& next, const Vector& g, StepReport& report) {
                          next.theta = descend(state.theta, sign_of(g), cfg.eta, next.t);
                          report.step_size = cfg.eta;
                        });
}

StepOutcome zo_adamm_step(const OptimizerState& state, const Objective& obj,
                          const OptimizerConfig& cfg, QueryCounter& counter,
                          const StepOptions& options) {
  return classical_step(state, obj, cfg, counter, options,
                        [&](OptimizerState& next, const Vector& g, StepReport& report) {
                          const std::size_t d = state.theta.size();
                          MomentUpdate u = adamm_update(
                              state.theta, g, state.first_moment.value_or(Vector::zeros(d)),
                              state.second_moment.value_or(Vector::zeros(d)), next.t, cfg);
                          next.theta = std::move(u.theta);
                          next.first_moment = std::move(u.first_moment);
                          next.second_moment = std::move(u.second_moment);
                          report.step_size = cfg.eta;
                        });
}

StepOutcome zo_rmsprop_step(const OptimizerState& state, const Objective& obj,
                            const OptimizerConfig& cfg, QueryCounter& counter,
                            const StepOptions& options) {
  return classical_step(state, obj, cfg, counter, options,
                        [&](OptimizerState& next, const Vector& g, StepReport& report) {
                          const std::size_t d = state.theta.size();
                          MomentUpdate u = rmsprop_update(
                              state.theta, g, state.second_moment.value_or(Vector::zeros(d)),
                              next.t, cfg);
                          next.theta = std::move(u.theta);
                          next.second_moment = std::move(u.second_moment);
                          report.step_size = cfg.eta;
                        });
}

StepOutcome step(OptimizerKind kind, const OptimizerState& state, const Objective& obj,
                 const OptimizerConfig& cfg, QueryCounter& counter, const StepOptions& options) {
  switch (kind) {
    case OptimizerKind::zosa: return zosa_step(state, obj, cfg, counter, options);
    case OptimizerKind::fzoo: return fzoo_step(state, obj, cfg, counter, options);
    case OptimizerKind::zo_sgd: return zo_sgd_step(state, obj, cfg, counter, options);
    case OptimizerKind::zo_sign_sgd: return zo_sign_sgd_step(state, obj, cfg, counter, options);
    case OptimizerKind::zo_adamm: return zo_adamm_step(state, obj, cfg, counter, options);
    case OptimizerKind::zo_rmsprop: return zo_rmsprop_step(state, obj, cfg, counter, options);
  }
  throw ConfigError("optimizer.kind", "unhandled optimizer kind");
}

RngStream init_stream(std::uint64_t seed) noexcept { return RngStream(seed).split(kInitStream); }

RngStream step_stream(std::uint64_t seed) noexcept { return RngStream(seed).split(kStepStream); }

RunResult run(OptimizerKind kind, const Objective& obj, const OptimizerConfig& cfg,
              std::uint64_t iterations, std::uint64_t seed, const RunOptions& options) {
  if (iterations == 0) throw ConfigError("iterations", "must be at least 1");
  cfg.validate(kind);

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  RunResult result;
  if (options.initial_theta) {
    if (options.initial_theta->size() != obj.dimension()) {
      throw ConfigError("initial_theta", fmt::format("length {} does not match dimension {}",
                                                     options.initial_theta->size(),
                                                     obj.dimension()));
    }
    result.initial_theta = *options.initial_theta;
  } else {
    RngStream init = init_stream(seed);
    result.initial_theta = sample_gaussian(obj.dimension(), init);
  }

  QueryCounter counter(options.query_budget);
  const auto gap_of = [&](double loss) -> std::optional<double> {
    if (!obj.optimum_value()) return std::nullopt;
    return loss - *obj.optimum_value();
  };

  OptimizerState state = initial_state(kind, result.initial_theta, step_stream(seed));
  const StepOptions step_options{options.track_cosine};
  const std::uint64_t cost = queries_per_step(kind, cfg);
  try {
    result.initial_loss = evaluate(obj, state.theta, counter, Tally::diagnostic);
    result.initial_gap = gap_of(result.initial_loss);
    for (std::uint64_t i = 0; i < iterations; ++i) {
      if (counter.remaining() < cost) {
        result.budget_exhausted = true;
        break;
      }
      StepOutcome out = step(kind, state, obj, cfg, counter, step_options);
      state = std::move(out.state);
      TraceRow row;
      row.iter = state.t;
      row.loss = evaluate(obj, state.theta, counter, Tally::diagnostic);
      row.gap = gap_of(row.loss);
      row.sigma = out.report.sigma;
      row.sigma_pert = out.report.sigma_pert;
      row.eps_sam_norm = out.report.eps_sam_norm;
      row.queries_cum = counter.optimization();
      row.cos_true = out.report.cos_true;
      row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      result.rows.push_back(row);
    }
  } catch (const PeerError& e) {
    result.failure_kind = FailureKind::peer;
    result.failure = fmt::format("peer error at iteration {}: {}", state.t + 1, e.what());
  } catch (const EvaluationError& e) {
    result.failure_kind = FailureKind::evaluation;
    result.failure = fmt::format("evaluation error at iteration {}: {}", state.t + 1, e.what());
  } catch (const DivergenceError& e) {
    result.failure_kind = FailureKind::divergence;
    result.failure = fmt::format("divergence: {}", e.what());
  } catch (const NonFiniteError& e) {
    result.failure_kind = FailureKind::divergence;
    result.failure = fmt::format("divergence at iteration {}: {}", state.t + 1, e.what());
  }
  result.final_theta = state.theta;
  result.optimization_queries = counter.optimization();
  result.diagnostic_queries = counter.diagnostic();
  return result;
}

}  // namespace zosa
