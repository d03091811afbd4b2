#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "zosa/estimators.hpp"
#include "zosa/objective.hpp"
#include "zosa/vector.hpp"

namespace zosa::diag {

// a.b / (|a| |b|), or 0 when either norm is below 1e-30.
double cosine_similarity(const Vector& a, const Vector& b);

struct AlignmentReport {
  double mean_cos = 0.0;
  double max_cos = 0.0;
  std::size_t trials = 0;
  double predicted_cos = 0.0;  // sqrt(m / (m + d - 1))
};

struct LawReport {
  double empirical = 0.0;
  double predicted = 0.0;
  double relative_error = 0.0;  // |empirical - predicted| / |predicted|, 0 when both vanish
  std::size_t trials = 0;
};

LawReport make_law_report(double empirical, double predicted, std::size_t trials) noexcept;

// sqrt(m / (m + d - 1)): cosine implied by E|g|^2 = (m + d - 1)/m |grad L|^2.
double predicted_alignment(std::size_t m, std::size_t d) noexcept;

// Loss probes for the estimator laws: L(theta) = a.theta (gradient a) and L = c.
Objective linear_objective(Vector a);
Objective constant_objective(std::size_t d, double c);

struct GradientAlignment {
  AlignmentReport initial;    // cos(g_t, grad L(theta))
  AlignmentReport perturbed;  // cos(g_pert, grad L(theta + eps_sam))
};

/// Draws `trials` points theta ~ N(0, I) and, at each, forms g_t, the SAM
/// perturbation rho g_t / sigma_t, and g_pert at the perturbed point exactly
/// as one ZOSA step would. The objective needs an analytic gradient. All
/// evaluations go to the diagnostic tally of `counter`.
GradientAlignment gradient_alignment_study(const Objective& obj, const EstimatorConfig& cfg,
                                           double rho, std::size_t trials, std::uint64_t seed,
                                           QueryCounter& counter, std::size_t workers = 0);

// Mean of sigma_t^2 at a fixed theta against eps^2 |grad L(theta)|^2.
LawReport sigma_law_study(const Objective& obj, const EstimatorConfig& cfg, const Vector& theta,
                          std::size_t trials, std::uint64_t seed, QueryCounter& counter,
                          std::size_t workers = 0);

// Mean |g - grad L|^2 at a fixed theta against (d - 1) |grad L|^2 / m.
LawReport mse_law_study(const Objective& obj, const EstimatorConfig& cfg, const Vector& theta,
                        std::size_t trials, std::uint64_t seed, QueryCounter& counter,
                        std::size_t workers = 0);

struct SamAlignmentReport {
  AlignmentReport alignment;        // cos(eps_sam, grad L / |grad L|)
  double mean_radius_ratio = 0.0;   // mean |eps_sam| / rho
  double mean_scaled_radius_ratio = 0.0;  // mean epsilon |eps_sam| / rho
};

SamAlignmentReport sam_alignment_study(const Objective& obj, const EstimatorConfig& cfg,
                                       double rho, std::size_t trials, std::uint64_t seed,
                                       QueryCounter& counter, std::size_t workers = 0);

struct MeanEstimateReport {
  Vector mean_grad;
  double relative_l2_error = 0.0;  // |mean - grad L| / |grad L|
  std::size_t trials = 0;
};

// Average of `trials` independent one-sided estimates at theta.
MeanEstimateReport mean_estimate_study(const Objective& obj, const EstimatorConfig& cfg,
                                       const Vector& theta, std::size_t trials,
                                       std::uint64_t seed, QueryCounter& counter,
                                       std::size_t workers = 0);

// Mean |g|^2 of the classical Gaussian estimator with n directions against
// (n + d - 1)/n |grad L|^2.
LawReport classical_second_moment_study(const Objective& obj, const Vector& theta,
                                        double epsilon, std::size_t n, std::size_t trials,
                                        std::uint64_t seed, QueryCounter& counter,
                                        std::size_t workers = 0);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace zosa::diag
