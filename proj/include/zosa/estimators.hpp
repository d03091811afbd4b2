#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zosa/objective.hpp"
#include "zosa/rng.hpp"
#include "zosa/vector.hpp"

namespace zosa {

enum class DirectionKind { rademacher, gaussian };

std::string_view to_string(DirectionKind kind) noexcept;
DirectionKind parse_direction_kind(std::string_view name);

struct EstimatorConfig {
  double epsilon = 1e-3;  // perturbation scale
  std::size_t m = 32;     // number of directions
  DirectionKind direction = DirectionKind::rademacher;

  // Throws ConfigError unless epsilon > 0 and m >= 1.
  void validate() const;
};

struct EstimateResult {
  Vector grad;
  double sigma = 0.0;  // Bessel-corrected std of perturbed_losses
  double base_loss = 0.0;
  std::vector<double> perturbed_losses;
  std::uint64_t queries = 0;
};

/// Averaged one-sided difference estimate along Rademacher directions:
///
///   grad = 1/(epsilon*m) * sum_i (l_i - l_0) u_i,  l_i = L(theta + epsilon u_i)
///
/// plus the loss spread sigma = loss_std(l_1..l_m) (l_0 excluded). Costs m + 1
/// evaluations: l_0 alone, then the m probes as one batch. Directions are
/// drawn from `rng` in index order before any evaluation.
EstimateResult one_sided_estimate(const Objective& obj, const Vector& theta,
                                  const EstimatorConfig& cfg, RngStream& rng,
                                  QueryCounter& counter, Tally tally = Tally::optimization);

// Same estimate along caller-supplied directions.
EstimateResult one_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                  std::span<const Vector> directions, QueryCounter& counter,
                                  Tally tally = Tally::optimization);

/// Classical two-sided Gaussian estimate averaged over n directions:
///
///   grad = 1/n * sum_i (L(theta + eps z_i) - L(theta - eps z_i)) / (2 eps) * z_i
///
/// Costs 2n evaluations, sent as a single batch ordered (+z_1, -z_1, +z_2, ...).
Vector classical_two_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                    std::size_t n, RngStream& rng, QueryCounter& counter,
                                    Tally tally = Tally::optimization);

Vector classical_two_sided_estimate(const Objective& obj, const Vector& theta, double epsilon,
                                    std::span<const Vector> directions, QueryCounter& counter,
                                    Tally tally = Tally::optimization);

// Sample standard deviation with the 1/(n-1) correction; 0 for a single value.
// Throws std::invalid_argument on empty input.
double loss_std(std::span<const double> losses);

}  // namespace zosa
