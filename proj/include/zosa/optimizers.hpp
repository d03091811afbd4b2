#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zosa/estimators.hpp"
#include "zosa/objective.hpp"
#include "zosa/rng.hpp"
#include "zosa/vector.hpp"

namespace zosa {

enum class OptimizerKind { zosa, fzoo, zo_sgd, zo_sign_sgd, zo_adamm, zo_rmsprop };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer_kind(std::string_view name);
// True for the kinds driven by the classical two-sided Gaussian estimator.
bool uses_classical_estimator(OptimizerKind kind) noexcept;

struct OptimizerConfig {
  double eta = 1e-4;
  double rho = 1e-5;  // ZOSA only
  EstimatorConfig estimator;
  double beta1 = 0.9;  // AdaMM
  double beta2 = 0.999;  // AdaMM, RMSProp
  double moment_epsilon = 1e-8;
  double sigma_floor = 1e-12;  // ZOSA, FZOO

  // Desk-scale defaults for `kind`: epsilon = 1e-3 with Rademacher directions
  // for ZOSA/FZOO, smoothing mu = 5e-3 with Gaussian directions for the
  // classical-estimator baselines.
  static OptimizerConfig defaults(OptimizerKind kind);

  // Throws ConfigError naming the first invalid field.
  void validate(OptimizerKind kind) const;
};

struct OptimizerState {
  Vector theta;
  std::uint64_t t = 0;
  std::optional<Vector> first_moment;
  std::optional<Vector> second_moment;
  RngStream rng{0};
};

OptimizerState initial_state(OptimizerKind kind, Vector theta, RngStream rng);

struct StepReport {
  std::optional<double> loss_before;  // l_0; classical estimators never query L(theta_t)
  double grad_norm_est = 0.0;         // norm of the estimate used in the update
  std::optional<double> sigma;
  std::optional<double> sigma_pert;
  std::optional<double> eps_sam_norm;
  double step_size = 0.0;             // eta actually applied (eta_adaptive for ZOSA/FZOO)
  bool sam_fallback = false;          // sigma_t <= floor, eps_sam forced to zero
  bool eta_fallback = false;          // sigma <= floor, plain eta used
  std::uint64_t queries_used = 0;
  std::optional<double> cos_true;     // cosine of the update estimate vs the analytic gradient
};

struct StepOutcome {
  OptimizerState state;
  StepReport report;
};

struct StepOptions {
  // Fill StepReport::cos_true when the objective has an analytic gradient.
  bool track_cosine = false;
};

// Optimization evaluations consumed by one step: ZOSA 2(m+1), FZOO m+1,
// classical-estimator baselines 2m (m plays the role of N).
std::uint64_t queries_per_step(OptimizerKind kind, const OptimizerConfig& cfg) noexcept;

// --- update rules --------------------------------------------------------

// rho * g / sigma when sigma > floor, else the zero vector.
Vector sam_perturbation(const Vector& g, double sigma, double rho, double sigma_floor);

// eta / sigma when sigma > floor, else eta.
double adaptive_step_size(double eta, double sigma, double sigma_floor) noexcept;

// theta - step * direction; throws DivergenceError(t, step) on a non-finite result.
Vector descend(const Vector& theta, const Vector& direction, double step, std::uint64_t t);

// Element-wise sign with sign(0) = 0.
Vector sign_of(const Vector& g);

struct MomentUpdate {
  Vector theta;
  std::optional<Vector> first_moment;
  Vector second_moment;
};

// Bias-corrected Adam-style update; t is the 1-based step number.
MomentUpdate adamm_update(const Vector& theta, const Vector& grad, const Vector& first_moment,
                          const Vector& second_moment, std::uint64_t t,
                          const OptimizerConfig& cfg);

// v <- beta2 v + (1 - beta2) g^2;  theta <- theta - eta g / (sqrt(v) + moment_epsilon)
MomentUpdate rmsprop_update(const Vector& theta, const Vector& grad, const Vector& second_moment,
                            std::uint64_t t, const OptimizerConfig& cfg);

// --- step functions ------------------------------------------------------

StepOutcome zosa_step(const OptimizerState& state, const Objective& obj,
                      const OptimizerConfig& cfg, QueryCounter& counter,
                      const StepOptions& options = {});
StepOutcome fzoo_step(const OptimizerState& state, const Objective& obj,
                      const OptimizerConfig& cfg, QueryCounter& counter,
                      const StepOptions& options = {});
StepOutcome zo_sgd_step(const OptimizerState& state, const Objective& obj,
                        const OptimizerConfig& cfg, QueryCounter& counter,
                        const StepOptions& options = {});
StepOutcome zo_sign_sgd_step(const OptimizerState& state, const Objective& obj,
                             const OptimizerConfig& cfg, QueryCounter& counter,
                             const StepOptions& options = {});
StepOutcome zo_adamm_step(const OptimizerState& state, const Objective& obj,
                          const OptimizerConfig& cfg, QueryCounter& counter,
                          const StepOptions& options = {});
StepOutcome zo_rmsprop_step(const OptimizerState& state, const Objective& obj,
                            const OptimizerConfig& cfg, QueryCounter& counter,
                            const StepOptions& options = {});

StepOutcome step(OptimizerKind kind, const OptimizerState& state, const Objective& obj,
                 const OptimizerConfig& cfg, QueryCounter& counter,
                 const StepOptions& options = {});

// --- runs ------------------------------------------------------------------

struct TraceRow {
  std::uint64_t iter = 0;  // 1-based
  double loss = 0.0;       // L(theta_{iter}) after the update
  std::optional<double> gap;
  std::optional<double> sigma;
  std::optional<double> sigma_pert;
  std::optional<double> eps_sam_norm;
  std::uint64_t queries_cum = 0;
  std::optional<double> cos_true;
  double wall_ms = 0.0;
};

struct RunOptions {
  std::optional<std::uint64_t> query_budget;
  bool track_cosine = false;
  // Starting point; drawn from N(0, I) on the run's init stream when absent.
  std::optional<Vector> initial_theta;
};

enum class FailureKind { none, evaluation, divergence, peer };

struct RunResult {
  std::vector<TraceRow> rows;
  Vector initial_theta;
  Vector final_theta;
  double initial_loss = 0.0;
  std::optional<double> initial_gap;
  std::uint64_t optimization_queries = 0;
  std::uint64_t diagnostic_queries = 0;
  bool budget_exhausted = false;
  std::optional<std::string> failure;  // set when a step raised; rows are truncated there
  FailureKind failure_kind = FailureKind::none;

  bool ok() const noexcept { return !failure.has_value(); }
};

// RNG layout of a run keyed by `seed`: RngStream(seed).split(1) draws theta_0,
// RngStream(seed).split(2) drives every step.
RngStream init_stream(std::uint64_t seed) noexcept;
RngStream step_stream(std::uint64_t seed) noexcept;

/// Applies `iterations` steps (fewer if the query budget cannot cover the next
/// step) and records one TraceRow per step. The loss column is measured on the
/// diagnostic tally. Evaluation or divergence errors end the run early with
/// `failure` set rather than propagating. Throws ConfigError for
/// iterations == 0 or an invalid config.
RunResult run(OptimizerKind kind, const Objective& obj, const OptimizerConfig& cfg,
              std::uint64_t iterations, std::uint64_t seed, const RunOptions& options = {});

}  // namespace zosa
