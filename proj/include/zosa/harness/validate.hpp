#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace zosa::harness {

enum class ValidationKind { sigma_law, mse_law, alignment, sam_alignment };

ValidationKind parse_validation_kind(const std::string& name);

/// Parameters of a validation study. Unset fields take the per-kind defaults:
///
///   sigma_law      quadratic, d = 10, theta = ones, eps = 1e-3, m = 32, 10^4 trials,
///                  pass if relative error <= 0.02
///   mse_law        linear (gradient = ones), d = 20, m = 5, 10^4 trials,
///                  pass if relative error <= 0.05
///   alignment      quadratic, d = 100, m = 1000, 100 trials,
///                  pass if |mean cos(g_t, grad) - sqrt(m/(m+d-1))| <= 0.05
///   sam_alignment  quadratic, d = 100, m = 1000, rho = 1e-5, 100 trials,
///                  pass if mean cos >= 0.9 and 0.8 <= mean eps*|eps_sam|/rho <= 1.25
struct ValidationParams {
  std::optional<std::string> function;  // quadratic|cubic|levy|rosenbrock|linear|constant
  std::optional<std::size_t> dimension;
  std::optional<std::size_t> m;
  std::optional<double> epsilon;
  std::optional<double> rho;
  std::optional<std::size_t> trials;
  std::optional<double> tolerance;
  std::optional<std::string> theta;  // "ones" or "random" (sigma_law, mse_law)
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

struct ValidationOutcome {
  nlohmann::json report;
  bool passed = false;
};

ValidationOutcome validate(ValidationKind kind, const ValidationParams& params);

// Runs validate() and writes the report as JSON to `out`.
ValidationOutcome validate_to_file(ValidationKind kind, const ValidationParams& params,
                                   const std::filesystem::path& out);

}  // namespace zosa::harness
