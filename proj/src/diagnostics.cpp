#include "zosa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "zosa/errors.hpp"
#include "zosa/optimizers.hpp"
#include "zosa/parallel.hpp"

namespace zosa::diag {

namespace {

constexpr double kNormFloor = 1e-30;
constexpr double kSigmaFloor = 1e-12;

void require_gradient(const Objective& obj) {
  if (!obj.has_gradient()) {
    throw ConfigError("function", fmt::format("objective '{}' has no analytic gradient", obj.name()));
  }
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw ConfigError("trials", "must be at least 1");
}

AlignmentReport summarize(const std::vector<double>& cosines, double predicted) {
  AlignmentReport r;
  r.trials = cosines.size();
  r.predicted_cos = predicted;
  r.max_cos = -1.0;
  double sum = 0.0;
  for (double c : cosines) {
    sum += c;
    r.max_cos = std::max(r.max_cos, c);
  }
  r.mean_cos = sum / static_cast<double>(cosines.size());
  return r;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double cosine_similarity(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kNormFloor || nb < kNormFloor) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

LawReport make_law_report(double empirical, double predicted, std::size_t trials) noexcept {
  LawReport r{empirical, predicted, 0.0, trials};
  if (predicted != 0.0) {
    r.relative_error = std::abs(empirical - predicted) / std::abs(predicted);
  } else {
    r.relative_error = empirical == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

double predicted_alignment(std::size_t m, std::size_t d) noexcept {
  return std::sqrt(static_cast<double>(m) / static_cast<double>(m + d - 1));
}

Objective linear_objective(Vector a) {
  const std::size_t d = a.size();
  return Objective("linear", d, [a](const Vector& theta) { return dot(a, theta); })
      .with_gradient([a](const Vector&) { return a; });
}

Objective constant_objective(std::size_t d, double c) {
  return Objective("constant", d, [c](const Vector&) { return c; })
      .with_gradient([d](const Vector&) { return Vector::zeros(d); });
}

GradientAlignment gradient_alignment_study(const Objective& obj, const EstimatorConfig& cfg,
                                           double rho, std::size_t trials, std::uint64_t seed,
                                           QueryCounter& counter, std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  cfg.validate();
  const std::size_t d = obj.dimension();
  std::vector<double> cos_initial(trials), cos_perturbed(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    const Vector theta = sample_gaussian(d, rng);
    const EstimateResult g = one_sided_estimate(obj, theta, cfg, rng, counter, Tally::diagnostic);
    const Vector perturbed = theta + sam_perturbation(g.grad, g.sigma, rho, kSigmaFloor);
    const EstimateResult gp =
        one_sided_estimate(obj, perturbed, cfg, rng, counter, Tally::diagnostic);
    cos_initial[k] = cosine_similarity(g.grad, obj.gradient(theta));
    cos_perturbed[k] = cosine_similarity(gp.grad, obj.gradient(perturbed));
  });
  const double predicted = predicted_alignment(cfg.m, d);
  return {summarize(cos_initial, predicted), summarize(cos_perturbed, predicted)};
}

LawReport sigma_law_study(const Objective& obj, const EstimatorConfig& cfg, const Vector& theta,
                          std::size_t trials, std::uint64_t seed, QueryCounter& counter,
                          std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  cfg.validate();
  std::vector<double> variances(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    const EstimateResult g = one_sided_estimate(obj, theta, cfg, rng, counter, Tally::diagnostic);
    variances[k] = g.sigma * g.sigma;
  });
  const double predicted = cfg.epsilon * cfg.epsilon * squared_norm(obj.gradient(theta));
  return make_law_report(mean_of(variances), predicted, trials);
}

LawReport mse_law_study(const Objective& obj, const EstimatorConfig& cfg, const Vector& theta,
                        std::size_t trials, std::uint64_t seed, QueryCounter& counter,
                        std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  cfg.validate();
  const Vector truth = obj.gradient(theta);
  std::vector<double> errors(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    const EstimateResult g = one_sided_estimate(obj, theta, cfg, rng, counter, Tally::diagnostic);
    errors[k] = squared_norm(g.grad - truth);
  });
  const double d = static_cast<double>(theta.size());
  const double predicted = (d - 1.0) * squared_norm(truth) / static_cast<double>(cfg.m);
  return make_law_report(mean_of(errors), predicted, trials);
}

SamAlignmentReport sam_alignment_study(const Objective& obj, const EstimatorConfig& cfg,
                                       double rho, std::size_t trials, std::uint64_t seed,
                                       QueryCounter& counter, std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  cfg.validate();
  if (!(rho > 0.0)) throw ConfigError("rho", "must be positive");
  const std::size_t d = obj.dimension();
  std::vector<double> cosines(trials), ratios(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    const Vector theta = sample_gaussian(d, rng);
    const EstimateResult g = one_sided_estimate(obj, theta, cfg, rng, counter, Tally::diagnostic);
    const Vector eps_sam = sam_perturbation(g.grad, g.sigma, rho, kSigmaFloor);
    cosines[k] = cosine_similarity(eps_sam, obj.gradient(theta));
    ratios[k] = norm(eps_sam) / rho;
  });
  SamAlignmentReport r;
  r.alignment = summarize(cosines, predicted_alignment(cfg.m, d));
  r.mean_radius_ratio = mean_of(ratios);
  r.mean_scaled_radius_ratio = cfg.epsilon * r.mean_radius_ratio;
  return r;
}

MeanEstimateReport mean_estimate_study(const Objective& obj, const EstimatorConfig& cfg,
                                       const Vector& theta, std::size_t trials,
                                       std::uint64_t seed, QueryCounter& counter,
                                       std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  cfg.validate();
  std::vector<Vector> estimates(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    estimates[k] = one_sided_estimate(obj, theta, cfg, rng, counter, Tally::diagnostic).grad;
  });
  std::vector<double> sum(theta.size(), 0.0);
  for (const Vector& g : estimates) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
  }
  for (double& s : sum) s /= static_cast<double>(trials);
  MeanEstimateReport r;
  r.mean_grad = Vector(std::move(sum));
  const Vector truth = obj.gradient(theta);
  const double truth_norm = norm(truth);
  const double err = norm(r.mean_grad - truth);
  r.relative_l2_error = truth_norm > 0.0 ? err / truth_norm : err;
  r.trials = trials;
  return r;
}

LawReport classical_second_moment_study(const Objective& obj, const Vector& theta,
                                        double epsilon, std::size_t n, std::size_t trials,
                                        std::uint64_t seed, QueryCounter& counter,
                                        std::size_t workers) {
  require_gradient(obj);
  require_trials(trials);
  if (n == 0) throw ConfigError("m", "must be at least 1");
  std::vector<double> second(trials);
  const RngStream root(seed);
  parallel_for(trials, workers, [&](std::size_t k) {
    RngStream rng = root.split(k);
    second[k] = squared_norm(
        classical_two_sided_estimate(obj, theta, epsilon, n, rng, counter, Tally::diagnostic));
  });
  const double d = static_cast<double>(theta.size());
  const double nn = static_cast<double>(n);
  const double predicted = (nn + d - 1.0) / nn * squared_norm(obj.gradient(theta));
  return make_law_report(mean_of(second), predicted, trials);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace zosa::diag
