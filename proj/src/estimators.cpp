#include "zosa/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "zosa/errors.hpp"

namespace zosa {

std::string_view to_string(DirectionKind kind) noexcept {
  return kind == DirectionKind::rademacher ? "rademacher" : "gaussian";
}

DirectionKind parse_direction_kind(std::string_view name) {
  if (name == "rademacher") return DirectionKind::rademacher;
  if (name == "gaussian") return DirectionKind::gaussian;
  throw ConfigError("direction", fmt::format("unknown direction kind '{}'", name));
}

void EstimatorConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon", fmt::format("must be a positive finite number, got {}", epsilon));
  }
  if (m == 0) throw ConfigError("m", "must be at least 1");
}

double loss_std(std::span<const double> losses) {
  if (losses.empty()) throw std::invalid_argument("loss_std: empty input");
  const std::size_t n = losses.size();
  if (n == 1) return 0.0;
  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double l : losses) ss += (l - mean) * (l - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

EstimateResult one_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                  std::span<const Vector> directions, QueryCounter& counter,
                                  Tally tally) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  if (directions.empty()) throw ConfigError("m", "must be at least 1");

  const std::size_t d = theta.size();
  const std::size_t m = directions.size();
  std::vector<Vector> probes;
  probes.reserve(m);
  for (const Vector& u : directions) probes.push_back(axpy(epsilon, u, theta));

  EstimateResult out;
  out.base_loss = evaluate(obj, theta, counter, tally);
  out.perturbed_losses = evaluate_batch(obj, probes, counter, tally);
  out.queries = m + 1;

  std::vector<double> g(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double diff = out.perturbed_losses[i] - out.base_loss;
    const Vector& u = directions[i];
    for (std::size_t k = 0; k < d; ++k) g[k] += diff * u[k];
  }
  const double scale = 1.0 / (epsilon * static_cast<double>(m));
  for (double& gk : g) gk *= scale;
  out.grad = Vector(std::move(g));
  out.sigma = loss_std(out.perturbed_losses);
  return out;
}

EstimateResult one_sided_estimate(const Objective& obj, const Vector& theta,
                                  const EstimatorConfig& cfg, RngStream& rng,
                                  QueryCounter& counter, Tally tally) {
  cfg.validate();
  if (cfg.direction != DirectionKind::rademacher) {
    throw ConfigError("direction", "the one-sided estimator requires rademacher directions");
  }
  std::vector<Vector> directions;
  directions.reserve(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) directions.push_back(sample_rademacher(theta.size(), rng));
  return one_sided_estimate(obj, theta, cfg.epsilon, directions, counter, tally);
}

Vector classical_two_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                    std::span<const Vector> directions, QueryCounter& counter,
                                    Tally tally) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  if (directions.empty()) throw ConfigError("m", "must be at least 1");

  const std::size_t d = theta.size();
  const std::size_t n = directions.size();
  std::vector<Vector> probes;
  probes.reserve(2 * n);
  for (const Vector& z : directions) {
    probes.push_back(axpy(epsilon, z, theta));
    probes.push_back(axpy(-epsilon, z, theta));
  }
  const std::vector<double> losses = evaluate_batch(obj, probes, counter, tally);

  std::vector<double> g(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double slope = (losses[2 * i] - losses[2 * i + 1]) / (2.0 * epsilon);
    const Vector& z = directions[i];
    for (std::size_t k = 0; k < d; ++k) g[k] += slope * z[k];
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (double& gk : g) gk *= scale;
  return Vector(std::move(g));
}

Vector classical_two_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                    std::size_t n, RngStream& rng, QueryCounter& counter,
                                    Tally tally) {
  if (n == 0) throw ConfigError("m", "must be at least 1");
  std::vector<Vector> directions;
  directions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) directions.push_back(sample_gaussian(theta.size(), rng));
  return classical_two_sided_estimate(obj, theta, epsilon, directions, counter, tally);
}

}  // namespace zosa
